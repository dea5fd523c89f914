use std::f64::consts::PI;

use affqetu_hamiltonian::{SpectrumBounds, TfimParams};
use affqetu_linalg::{paulis, DenseMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::{Gate, GateList, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrotterOrder {
    /// Strang splitting: half X layer, ZZ layer, half X layer.
    #[default]
    Second,
    /// Suzuki's fourth-order product of five Strang steps.
    Fourth,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterOptions {
    pub order: TrotterOrder,
    /// Largest step; the step count is `ceil(t / max_dt)`.
    pub max_dt: f64,
}

impl Default for TrotterOptions {
    fn default() -> Self {
        Self { order: TrotterOrder::Second, max_dt: 1.0 }
    }
}

impl TrotterOptions {
    pub fn steps(&self, t: f64) -> usize {
        ((t.abs() / self.max_dt).ceil() as usize).max(1)
    }
}

/// Circuit for `e^{-i H~ t}` with `H~ = pi (H - lb) / (ub - lb)`, optionally
/// controlled on `ancilla`. System qubits are `0..L`.
pub fn trotter_circuit(
    params: &TfimParams,
    bounds: &SpectrumBounds,
    t: f64,
    controlled: bool,
    ancilla: usize,
) -> Result<GateList> {
    trotter_circuit_with(params, bounds, t, controlled, ancilla, &TrotterOptions::default())
}

pub fn trotter_circuit_with(
    params: &TfimParams,
    bounds: &SpectrumBounds,
    t: f64,
    controlled: bool,
    ancilla: usize,
    opts: &TrotterOptions,
) -> Result<GateList> {
    params.validate()?;
    bounds.validate()?;
    let n_qubits = if controlled { params.l.max(ancilla + 1) } else { params.l };
    if controlled && ancilla < params.l {
        return Err(crate::CircuitError::BadCircuit(format!("ancilla {ancilla} overlaps the system register")));
    }
    let scale = PI / bounds.width();
    let builder = Builder { params, scale, controlled, ancilla };
    let n = opts.steps(t);
    let dt = t / n as f64;
    let mut gl = GateList::new(n_qubits);
    for _ in 0..n {
        match opts.order {
            TrotterOrder::Second => builder.strang(&mut gl, dt)?,
            TrotterOrder::Fourth => {
                let p = 1.0 / (4.0 - 4f64.powf(1.0 / 3.0));
                for tau in [p, p, 1.0 - 4.0 * p, p, p] {
                    builder.strang(&mut gl, tau * dt)?;
                }
            }
        }
    }
    // The -lb shift contributes e^{i scale lb t}: a global phase, or a phase
    // on the ancilla |1> branch when controlled.
    let shift = scale * bounds.lambda_lb * t;
    if controlled {
        gl.push(Gate::one(&paulis::phase(shift), ancilla)?)?;
    } else {
        gl.global_phase += shift;
    }
    Ok(gl)
}

struct Builder<'a> {
    params: &'a TfimParams,
    scale: f64,
    controlled: bool,
    ancilla: usize,
}

impl Builder<'_> {
    fn strang(&self, gl: &mut GateList, dt: f64) -> Result<()> {
        self.x_layer(gl, dt / 2.0)?;
        self.zz_layer(gl, dt)?;
        self.x_layer(gl, dt / 2.0)
    }

    /// `e^{i scale g tau X_q}` on every site.
    fn x_layer(&self, gl: &mut GateList, tau: f64) -> Result<()> {
        let u = paulis::rx(-self.scale * self.params.g * tau);
        for q in 0..self.params.l {
            self.rotation(gl, &u, q)?;
        }
        Ok(())
    }

    /// `e^{i scale J tau Z_a Z_b}` on every bond, even bonds first.
    fn zz_layer(&self, gl: &mut GateList, tau: f64) -> Result<()> {
        let alpha = self.scale * self.params.j * tau;
        let bonds = self.params.bonds();
        let ordered = bonds.iter().step_by(2).chain(bonds.iter().skip(1).step_by(2));
        for &(a, b) in ordered {
            if self.controlled {
                gl.push(Gate::two(&paulis::cnot(), a, b)?)?;
                self.rotation(gl, &paulis::rz(-alpha), b)?;
                gl.push(Gate::two(&paulis::cnot(), a, b)?)?;
            } else {
                gl.push(Gate::two(&zz_rotation(alpha), a, b)?)?;
            }
        }
        Ok(())
    }

    fn rotation(&self, gl: &mut GateList, u: &DenseMatrix, q: usize) -> Result<()> {
        if self.controlled {
            gl.push(Gate::two(&paulis::controlled(u), self.ancilla, q)?)
        } else {
            gl.push(Gate::one(u, q)?)
        }
    }
}

/// `e^{i alpha Z Z}`.
fn zz_rotation(alpha: f64) -> DenseMatrix {
    let p = C64::from_polar(1.0, alpha);
    let m = p.conj();
    DenseMatrix::diagonal(&[p, m, m, p])
}
