//! The ambient cone: either the upper half-space or all of space.

use crate::error::{input_err, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeKind {
    /// The upper half-space, all points with positive last coordinate.
    HalfSpace,
    /// The whole space.
    FullSpace,
}

/// Domain cone with vertex at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeSpec {
    pub kind: ConeKind,
    pub dim: usize,
}

impl ConeSpec {
    pub fn half_space(dim: usize) -> Result<Self> {
        if dim < 2 {
            return input_err(format!("cone dimension must be >= 2, got {dim}"));
        }
        Ok(ConeSpec { kind: ConeKind::HalfSpace, dim })
    }

    pub fn full_space(dim: usize) -> Result<Self> {
        if dim < 2 {
            return input_err(format!("cone dimension must be >= 2, got {dim}"));
        }
        Ok(ConeSpec { kind: ConeKind::FullSpace, dim })
    }

    /// True if the point lies in the open cone.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self.kind {
            ConeKind::HalfSpace => x[self.dim - 1] > 0.0,
            ConeKind::FullSpace => true,
        }
    }
}
