use serde::{Deserialize, Serialize};

use super::{validate_dates, OptionKind};
use crate::error::{invalid, Result};
use crate::model::SpatialGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "style", rename_all = "lowercase")]
pub enum ExerciseStyle {
    European,
    /// Exercisable on the listed dates (maturity included or not).
    Bermudan {
        dates: Vec<f64>,
    },
    /// Exercisable after every time step.
    American,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanillaSpec {
    pub strike: f64,
    pub option: OptionKind,
    pub maturity: f64,
    #[serde(flatten)]
    pub exercise: ExerciseStyle,
}

impl VanillaSpec {
    pub fn european(option: OptionKind, strike: f64, maturity: f64) -> Self {
        Self { strike, option, maturity, exercise: ExerciseStyle::European }
    }

    /// `per_year` equally spaced exercise dates up to and including maturity.
    pub fn bermudan(option: OptionKind, strike: f64, maturity: f64, per_year: usize) -> Self {
        let count = (maturity * per_year as f64).round().max(1.0) as usize;
        let dates = (1..=count).map(|k| maturity * k as f64 / count as f64).collect();
        Self { strike, option, maturity, exercise: ExerciseStyle::Bermudan { dates } }
    }

    pub fn american(option: OptionKind, strike: f64, maturity: f64) -> Self {
        Self { strike, option, maturity, exercise: ExerciseStyle::American }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strike > 0.0) || !(self.maturity > 0.0) {
            return Err(invalid("vanilla: strike and maturity must be positive"));
        }
        if let ExerciseStyle::Bermudan { dates } = &self.exercise {
            validate_dates(dates, "bermudan exercise")?;
            if *dates.last().expect("non-empty") > self.maturity * (1.0 + 1e-12) {
                return Err(invalid("bermudan exercise dates must not exceed maturity"));
            }
        }
        Ok(())
    }

    pub fn terminal_payoff(&self, grid: &SpatialGrid) -> Vec<f64> {
        self.intrinsic(grid)
    }

    pub fn intrinsic(&self, grid: &SpatialGrid) -> Vec<f64> {
        (0..grid.len()).map(|m| self.option.payoff(grid.s(m), self.strike)).collect()
    }
}

/// Pointwise `max(continuation, intrinsic)`.
pub fn exercise_update(mut cont: Vec<f64>, spec: &VanillaSpec, grid: &SpatialGrid) -> Vec<f64> {
    for (m, v) in cont.iter_mut().enumerate() {
        *v = v.max(spec.option.payoff(grid.s(m), spec.strike));
    }
    cont
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SpatialGrid {
        SpatialGrid::new(40.0, -0.6, 0.64, 200).unwrap()
    }

    #[test]
    fn exercise_against_zero_continuation_is_intrinsic() {
        let spec = VanillaSpec::european(OptionKind::Put, 40.0, 1.0);
        let g = grid();
        assert_eq!(exercise_update(vec![0.0; g.len()], &spec, &g), spec.intrinsic(&g));
        let high = vec![100.0; g.len()];
        assert_eq!(exercise_update(high.clone(), &spec, &g), high);
    }

    #[test]
    fn bermudan_schedule() {
        let spec = VanillaSpec::bermudan(OptionKind::Put, 40.0, 2.0, 50);
        let ExerciseStyle::Bermudan { dates } = &spec.exercise else { panic!() };
        assert_eq!(dates.len(), 100);
        assert_eq!(*dates.last().unwrap(), 2.0);
        assert!(spec.validate().is_ok());
        assert!(VanillaSpec::european(OptionKind::Call, -1.0, 1.0).validate().is_err());
    }
}
