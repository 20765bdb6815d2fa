use itertools::Itertools;

use super::array::{Arrangement, IrradianceMatrix, PvParams};
use crate::error::{check_dims, Error, Result};

/// Largest number of arrangements [`brute_force_best`] will enumerate.
pub const BRUTE_FORCE_LIMIT: f64 = 1e7;

/// Operating point after bypassing the weakest rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub remaining_rows: usize,
    pub voltage: f64,
    pub current: f64,
    pub power: f64,
}

/// One point per bypass step, from all rows active down to a single row.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub points: Vec<CurvePoint>,
}

impl PowerCurve {
    /// Highest-power point; ties go to the point with more active rows.
    pub fn max_point(&self) -> Option<&CurvePoint> {
        self.points
            .iter()
            .fold(None, |best: Option<&CurvePoint>, p| match best {
                Some(b) if b.power >= p.power => Some(b),
                _ => Some(p),
            })
    }
}

/// Row currents `I_i = I_m Σ_j k` over the cells currently in row `i`.
pub fn row_currents(
    arr: &Arrangement,
    irr: &IrradianceMatrix,
    params: &PvParams,
) -> Result<Vec<f64>> {
    check_dims(irr.rows(), arr.rows())?;
    check_dims(irr.cols(), arr.cols())?;
    Ok(row_currents_unchecked(arr, irr, params))
}

fn row_currents_unchecked(
    arr: &Arrangement,
    irr: &IrradianceMatrix,
    params: &PvParams,
) -> Vec<f64> {
    (0..arr.rows())
        .map(|r| {
            let k: f64 = (0..arr.cols()).map(|c| irr.get(arr.get(r, c), c)).sum();
            params.i_m * k
        })
        .collect()
}

/// Bypasses rows weakest first and returns the best power with the full
/// curve. With currents sorted ascending, the candidate at 1-based rank `r`
/// is `(R − r + 1) · V_m · I_r`.
pub fn max_power(currents: &[f64], v_m: f64) -> (f64, PowerCurve) {
    let mut sorted = currents.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let points: Vec<CurvePoint> = sorted
        .iter()
        .enumerate()
        .map(|(i, &current)| {
            let remaining_rows = n - i;
            let voltage = remaining_rows as f64 * v_m;
            CurvePoint {
                remaining_rows,
                voltage,
                current,
                power: voltage * current,
            }
        })
        .collect();
    let curve = PowerCurve { points };
    let best = curve.max_point().map_or(0.0, |p| p.power);
    (best, curve)
}

/// Maximum output power of `arr`, the fitness of the discrete search.
pub fn arrangement_power(
    arr: &Arrangement,
    irr: &IrradianceMatrix,
    params: &PvParams,
) -> Result<f64> {
    Ok(max_power(&row_currents(arr, irr, params)?, params.v_m).0)
}

pub(crate) fn arrangement_power_unchecked(
    arr: &Arrangement,
    irr: &IrradianceMatrix,
    params: &PvParams,
) -> f64 {
    max_power(&row_currents_unchecked(arr, irr, params), params.v_m).0
}

/// Power of the unmodified (total-cross-tied) wiring.
pub fn baseline_tct(irr: &IrradianceMatrix, params: &PvParams) -> (f64, PowerCurve) {
    let arr = Arrangement::identity(irr.rows(), irr.cols());
    max_power(&row_currents_unchecked(&arr, irr, params), params.v_m)
}

/// Exact optimum by enumeration. The first column stays fixed since
/// relabelling rows does not change the power.
pub fn brute_force_best(irr: &IrradianceMatrix, params: &PvParams) -> Result<(f64, Arrangement)> {
    let (rows, cols) = (irr.rows(), irr.cols());
    let factorial: f64 = (1..=rows).map(|v| v as f64).product();
    let candidates = factorial.powi(cols as i32 - 1);
    if candidates > BRUTE_FORCE_LIMIT {
        return Err(Error::SearchTooLarge {
            candidates,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let perms: Vec<Vec<usize>> = (0..rows).permutations(rows).collect();
    let mut choice = vec![0usize; cols];
    let mut arr = Arrangement::identity(rows, cols);
    let mut best = (arrangement_power_unchecked(&arr, irr, params), arr.clone());
    loop {
        // Odometer over the free columns.
        let mut c = 1;
        loop {
            if c >= cols {
                return Ok(best);
            }
            choice[c] += 1;
            if choice[c] < perms.len() {
                arr.set_column(c, &perms[choice[c]]);
                break;
            }
            choice[c] = 0;
            arr.set_column(c, &perms[0]);
            c += 1;
        }
        let power = arrangement_power_unchecked(&arr, irr, params);
        if power > best.0 {
            best = (power, arr.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit() -> PvParams {
        PvParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn full_bright_row() {
        let irr = IrradianceMatrix::uniform(1, 9, 0.9).unwrap();
        let i = row_currents(&Arrangement::identity(1, 9), &irr, &PvParams::default()).unwrap();
        assert!((i[0] - 8.1 * 3.902).abs() < 1e-12);
        let dark = IrradianceMatrix::uniform(2, 3, 0.0).unwrap();
        assert_eq!(
            row_currents(&Arrangement::identity(2, 3), &dark, &unit()).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn tct_shadow_curve() {
        let currents = [3.6, 3.6, 3.6, 6.6, 8.1, 8.1, 8.1, 8.1, 8.1];
        let (p, curve) = max_power(&currents, 1.0);
        assert!((p - 40.5).abs() < 1e-12);
        assert_eq!(curve.points.len(), 9);
        assert_eq!(curve.max_point().unwrap().remaining_rows, 5);
        for w in curve.points.windows(2) {
            assert!(w[0].voltage > w[1].voltage);
        }
        for pt in &curve.points {
            assert_eq!(pt.power, pt.voltage * pt.current);
        }
    }

    #[test]
    fn balanced_rows_use_full_voltage() {
        let mut currents = vec![6.3; 5];
        currents.extend([6.6; 4]);
        let (p, curve) = max_power(&currents, 1.0);
        assert!((p - 56.7).abs() < 1e-12);
        assert_eq!(curve.max_point().unwrap().remaining_rows, 9);
        let (p, _) = max_power(&[2.0; 4], 3.0);
        assert_eq!(p, 24.0);
    }

    #[test]
    fn currents_match_direct_accumulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let irr = IrradianceMatrix::random(6, 5, &mut rng).unwrap();
        let arr = Arrangement::random(6, 5, &mut rng);
        let p = PvParams::default();
        let got = row_currents(&arr, &irr, &p).unwrap();
        let mut oracle = vec![0.0; 6];
        for (slot, &label) in arr.labels().iter().enumerate() {
            let (r, c) = (slot / 5, slot % 5);
            oracle[r] += irr.get(label, c) * p.i_m;
        }
        for (g, o) in got.iter().zip(&oracle) {
            assert!((g - o).abs() < 1e-12);
        }
        assert!(row_currents(&Arrangement::identity(5, 5), &irr, &p).is_err());
    }

    #[test]
    fn shipped_shadow_bounds() {
        let irr = IrradianceMatrix::short_wide_shadow();
        let (tct, curve) = baseline_tct(&irr, &unit());
        assert!((tct - 40.5).abs() < 1e-9);
        assert_eq!(curve.points.len(), 9);
        // A reconfiguration with five rows at 6.3 and four at or above 6.6.
        let text = "9 9
1 9 3 2 5 4 7 4 9
7 6 7 1 7 6 5 9 5
8 8 2 8 2 1 8 5 3
5 3 4 7 4 7 1 3 7
2 5 1 9 8 2 9 2 4
3 4 8 6 6 9 2 1 6
6 2 5 3 9 8 4 7 1
4 7 6 5 1 3 6 8 8
9 1 9 4 3 5 3 6 2
";
        let arr = Arrangement::parse(text, std::path::Path::new("best.txt")).unwrap();
        let currents = row_currents(&arr, &irr, &unit()).unwrap();
        assert!((currents.iter().sum::<f64>() - 57.9).abs() < 1e-9);
        assert!((arrangement_power(&arr, &irr, &unit()).unwrap() - 56.7).abs() < 1e-9);
    }

    #[test]
    fn two_by_two_oracle() {
        let irr = IrradianceMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (p, _) = brute_force_best(&irr, &unit()).unwrap();
        assert_eq!(p, 2.0);
    }

    #[test]
    fn oracle_never_below_tct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let irr = IrradianceMatrix::random(3, 3, &mut rng).unwrap();
            let (best, arr) = brute_force_best(&irr, &unit()).unwrap();
            assert!(best >= baseline_tct(&irr, &unit()).0);
            assert_eq!(arrangement_power(&arr, &irr, &unit()).unwrap(), best);
            assert_eq!(arr.column(0), vec![0, 1, 2]);
        }
        let uniform = IrradianceMatrix::uniform(3, 3, 0.4).unwrap();
        let (best, _) = brute_force_best(&uniform, &unit()).unwrap();
        assert!((best - baseline_tct(&uniform, &unit()).0).abs() < 1e-12);
    }

    #[test]
    fn oracle_size_guard() {
        let irr = IrradianceMatrix::uniform(9, 9, 0.5).unwrap();
        assert!(matches!(
            brute_force_best(&irr, &unit()),
            Err(Error::SearchTooLarge { .. })
        ));
    }
}
