//! JSON containers for operators, used by the CLI fixtures.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMat, Operator, SystemLayout};
use crate::error::{Error, Result};

/// Row-major JSON form of an [`Operator`]:
/// `{layout: [[label, dim], ...], re: [[...]], im: [[...]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub layout: Vec<(String, usize)>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl Operator {
    pub fn to_json(&self) -> OperatorJson {
        let d = self.dim();
        let mut re = vec![vec![0.0; d]; d];
        let mut im = vec![vec![0.0; d]; d];
        for r in 0..d {
            for c_ in 0..d {
                re[r][c_] = self.matrix()[(r, c_)].re;
                im[r][c_] = self.matrix()[(r, c_)].im;
            }
        }
        OperatorJson {
            layout: self.layout().factors().to_vec(),
            re,
            im,
        }
    }

    pub fn from_json(json: &OperatorJson) -> Result<Operator> {
        let layout = SystemLayout::new(json.layout.clone())?;
        let d = layout.total_dim();
        if json.re.len() != d || json.im.len() != d {
            return Err(Error::Config(format!(
                "operator container has {} rows, layout says {d}",
                json.re.len()
            )));
        }
        let mut mat = CMat::zeros(d, d);
        for r in 0..d {
            if json.re[r].len() != d || json.im[r].len() != d {
                return Err(Error::Config(format!("row {r} has wrong length")));
            }
            for c_ in 0..d {
                mat[(r, c_)] = Complex64::new(json.re[r][c_], json.im[r][c_]);
            }
        }
        Operator::new(layout, mat)
    }
}
