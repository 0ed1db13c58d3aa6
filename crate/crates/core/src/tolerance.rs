/// Absolute comparison tolerance, scaled by `max(1, |magnitude|)` at use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance(pub f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-9);
    /// Used for LP feasibility and tight-set detection.
    pub const LP: Tolerance = Tolerance(1e-7);

    pub fn scaled(self, magnitude: f64) -> f64 {
        self.0 * magnitude.abs().max(1.0)
    }

    pub fn eq(self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.scaled(a.abs().max(b.abs()))
    }

    /// `a >= b` up to tolerance.
    pub fn geq(self, a: f64, b: f64) -> bool {
        a >= b - self.scaled(a.abs().max(b.abs()))
    }

    /// `a > b` by more than the tolerance.
    pub fn gt(self, a: f64, b: f64) -> bool {
        a > b + self.scaled(a.abs().max(b.abs()))
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}
