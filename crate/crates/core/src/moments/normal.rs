use super::{DeltaTable, MomentIndex, MomentSet};
use crate::error::{Error, Result};

/// Standardized moments of a trivariate normal `(y, x, z)`.
///
/// Odd-order entries vanish; fourth-order entries follow from pairing the
/// four factors in the three possible ways (Isserlis). Means and coefficients
/// of variation are left absent; attach them with [`MomentSet::with_cv`].
pub fn trivariate_normal_moments(rho_yx: f64, rho_xz: f64, rho_yz: f64) -> Result<MomentSet> {
    for (name, r) in [("rho_yx", rho_yx), ("rho_xz", rho_xz), ("rho_yz", rho_yz)] {
        if !(r.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} = {r} must lie in (-1, 1)"
            )));
        }
    }
    let det =
        1.0 + 2.0 * rho_yx * rho_xz * rho_yz - rho_yx * rho_yx - rho_xz * rho_xz - rho_yz * rho_yz;
    if !(det > 0.0) {
        return Err(Error::InvalidParameter(
            "correlations do not form a positive-definite matrix".into(),
        ));
    }

    // corr[i][j] with 0 = y, 1 = x, 2 = z
    let corr = [
        [1.0, rho_yx, rho_yz],
        [rho_yx, 1.0, rho_xz],
        [rho_yz, rho_xz, 1.0],
    ];

    let mut delta = DeltaTable::new();
    for idx in MomentIndex::all_up_to_fourth() {
        let mut vars = Vec::with_capacity(4);
        vars.extend(std::iter::repeat_n(0usize, idx.p as usize));
        vars.extend(std::iter::repeat_n(1usize, idx.q as usize));
        vars.extend(std::iter::repeat_n(2usize, idx.m as usize));
        let value = match vars.len() {
            2 => corr[vars[0]][vars[1]],
            3 => 0.0,
            4 => {
                let c = |a: usize, b: usize| corr[vars[a]][vars[b]];
                c(0, 1) * c(2, 3) + c(0, 2) * c(1, 3) + c(0, 3) * c(1, 2)
            }
            _ => unreachable!("orders 2..=4 only"),
        };
        delta.insert(idx, value);
    }

    Ok(MomentSet {
        rho_yx: Some(rho_yx),
        rho_xz: Some(rho_xz),
        rho_yz: Some(rho_yz),
        delta,
        ..MomentSet::default()
    })
}

/// Bivariate-normal moments for `(y, x)` with correlation `rho`; `z` is
/// independent of both.
pub fn normal_theory_moments(rho: f64) -> Result<MomentSet> {
    trivariate_normal_moments(rho, 0.0, 0.0)
}
