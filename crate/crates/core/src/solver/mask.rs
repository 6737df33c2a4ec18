use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::{Shape, Tensor3};

/// Which entries of an image were observed (`true`) in an inpainting problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationMask {
    shape: Shape,
    observed: Vec<bool>,
}

impl ObservationMask {
    pub fn new(shape: Shape, observed: Vec<bool>) -> Result<Self> {
        shape.validate()?;
        if observed.len() != shape.len() {
            return Err(Error::invalid("mask length does not match shape"));
        }
        Ok(ObservationMask { shape, observed })
    }

    pub fn all(shape: Shape) -> Self {
        ObservationMask { shape, observed: vec![true; shape.len()] }
    }

    pub fn none(shape: Shape) -> Self {
        ObservationMask { shape, observed: vec![false; shape.len()] }
    }

    /// Reads a 0/1 tensor; anything other than exactly 0 or 1 is rejected.
    pub fn from_tensor(t: &Tensor3) -> Result<Self> {
        let observed = t
            .data()
            .iter()
            .map(|&v| match v {
                v if v == 1.0 => Ok(true),
                v if v == 0.0 => Ok(false),
                _ => Err(Error::invalid("mask tensor entries must be 0 or 1")),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ObservationMask { shape: t.shape(), observed })
    }

    pub fn to_tensor(&self) -> Tensor3 {
        let data = self.observed.iter().map(|&o| if o { 1.0 } else { 0.0 }).collect();
        Tensor3::from_vec(self.shape, data).expect("mask shape is valid")
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.observed
    }

    pub fn is_observed(&self, i: usize) -> bool {
        self.observed[i]
    }

    pub fn set(&mut self, i: usize, observed: bool) {
        self.observed[i] = observed;
    }

    pub fn count(&self) -> usize {
        self.observed.iter().filter(|&&o| o).count()
    }

    pub fn fraction(&self) -> f64 {
        self.count() as f64 / self.observed.len() as f64
    }

    /// `P_Omega(x)`: keeps observed entries and zeroes the rest.
    pub fn project(&self, x: &Tensor3) -> Tensor3 {
        assert_eq!(x.shape(), self.shape, "mask shape mismatch");
        let mut out = x.clone();
        for (v, &o) in out.data_mut().iter_mut().zip(&self.observed) {
            if !o {
                *v = 0.0;
            }
        }
        out
    }

    pub(crate) fn check_tensor(&self, x: &Tensor3) -> Result<()> {
        if x.shape() != self.shape {
            return Err(Error::ShapeMismatch { expected: self.shape, found: x.shape() });
        }
        Ok(())
    }
}
