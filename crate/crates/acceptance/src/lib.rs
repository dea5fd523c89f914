//! Workspace-level acceptance checks. Everything lives in `tests/acceptance.rs`;
//! run with `cargo test -p affqetu-acceptance -- --nocapture --test-threads 1`.
