//! Exact discrete-user counterpart of the continuum model.
//!
//! Users are described only by their distance to the BS. With SIC a user
//! removes the signals meant for every farther user, so its interference is
//! the power sent to nearer users; without SIC everybody else interferes.
//! Both systems have exact solutions, and [`verify_sinr`] recomputes the
//! SINR of each user from raw powers and gains.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cell::CellParams;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Users of one cell, sorted by distance.
///
/// Ties are ordered by insertion index; the earlier user counts as nearer
/// for SIC.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSet<T> {
    distances: Vec<T>,
    tie_order: Vec<usize>,
    radius: T,
    min_distance: T,
    seed: Option<u64>,
}

impl<T: Real> UserSet<T> {
    /// Builds a set from distances in insertion order.
    pub fn from_distances(distances: Vec<T>, min_distance: T, radius: T) -> Result<Self> {
        Self::build(distances, min_distance, radius, None)
    }

    fn build(distances: Vec<T>, min_distance: T, radius: T, seed: Option<u64>) -> Result<Self> {
        if distances.is_empty() {
            return Err(Error::EmptyUserSet);
        }
        if !(min_distance >= T::zero() && radius > min_distance) {
            return Err(Error::InvalidInterval {
                lo: to_f64(min_distance),
                hi: to_f64(radius),
            });
        }
        if let Some(&r) = distances
            .iter()
            .find(|&&r| !(r >= min_distance && r <= radius))
        {
            return Err(Error::OutsideCell {
                r: to_f64(r),
                r0: to_f64(min_distance),
                rc: to_f64(radius),
            });
        }
        let mut order: Vec<usize> = (0..distances.len()).collect();
        order.sort_by(|&i, &j| {
            distances[i]
                .partial_cmp(&distances[j])
                .unwrap_or(Ordering::Equal)
                .then(i.cmp(&j))
        });
        Ok(UserSet {
            distances: order.iter().map(|&i| distances[i]).collect(),
            tie_order: order,
            radius,
            min_distance,
            seed,
        })
    }

    /// Distances in ascending order.
    pub fn distances(&self) -> &[T] {
        &self.distances
    }

    /// Insertion index of each sorted user.
    pub fn tie_order(&self) -> &[usize] {
        &self.tie_order
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn min_distance(&self) -> T {
        self.min_distance
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}

/// Draws `n` i.i.d. distances with the area-uniform law
/// `r = sqrt(R_0^2 + U (R_c^2 - R_0^2))`.
pub fn place_users_uniform<T: Real>(
    n: usize,
    min_distance: T,
    radius: T,
    seed: u64,
) -> Result<UserSet<T>> {
    if n == 0 {
        return Err(Error::EmptyUserSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r0sq = min_distance * min_distance;
    let span = radius * radius - r0sq;
    let distances = (0..n)
        .map(|_| {
            let u: T = lit(rng.gen::<f64>());
            (r0sq + u * span).sqrt().min(radius).max(min_distance)
        })
        .collect();
    UserSet::build(distances, min_distance, radius, Some(seed))
}

/// Deterministic equal-area placement: the k-th user (1-based) sits at
/// `sqrt(R_0^2 + (k - 1/2)(R_c^2 - R_0^2)/n)`.
pub fn place_users_rings<T: Real>(n: usize, min_distance: T, radius: T) -> Result<UserSet<T>> {
    if n == 0 {
        return Err(Error::EmptyUserSet);
    }
    let r0sq = min_distance * min_distance;
    let share = (radius * radius - r0sq) / lit(n as f64);
    let distances = (1..=n)
        .map(|k| (r0sq + (lit::<T>(k as f64) - lit(0.5)) * share).sqrt())
        .collect();
    UserSet::build(distances, min_distance, radius, None)
}

/// Link parameters needed by the discrete solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleParams<T> {
    pub sinr_target: T,
    pub pathloss_constant: T,
    pub noise: T,
    pub pathloss_exponent: T,
}

impl<T: Real> OracleParams<T> {
    fn validate(&self) -> Result<()> {
        let check = |field, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    field,
                    reason: "must be finite and positive".into(),
                })
            }
        };
        check(
            "sinr_target",
            self.sinr_target > T::zero() && self.sinr_target.is_finite(),
        )?;
        check(
            "pathloss_constant",
            self.pathloss_constant > T::zero() && self.pathloss_constant.is_finite(),
        )?;
        check("noise", self.noise > T::zero() && self.noise.is_finite())?;
        check(
            "pathloss_exponent",
            self.pathloss_exponent > T::zero() && self.pathloss_exponent.is_finite(),
        )
    }

    fn zeta(&self) -> T {
        (self.sinr_target + T::one()) / self.sinr_target
    }

    /// `(N_th / K) r^eta`: noise referred back to the transmitter.
    fn noise_at_bs(&self, r: T) -> T {
        self.noise / self.pathloss_constant * r.powf(self.pathloss_exponent)
    }
}

impl<T: Real> From<&CellParams<T>> for OracleParams<T> {
    fn from(p: &CellParams<T>) -> Self {
        OracleParams {
            sinr_target: p.sinr_target,
            pathloss_constant: p.pathloss_constant,
            noise: p.noise,
            pathloss_exponent: p.pathloss_exponent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AllocationMode {
    Sic,
    NoSic,
}

impl AllocationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AllocationMode::Sic => "SIC",
            AllocationMode::NoSic => "NoSIC",
        }
    }
}

impl fmt::Display for AllocationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Powers for every user of a [`UserSet`], in the set's sorted order.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult<T> {
    pub powers: Vec<T>,
    /// Sum of `powers`; `inf` when infeasible.
    pub total_power: T,
    pub achieved_sinr: Vec<T>,
    pub mode: AllocationMode,
    pub feasible: bool,
}

/// SIC allocation by the sequential recursion over ascending distance:
/// `P_k = gamma* (S_{k-1} + (N_th/K) r_k^eta)`, `S_k = S_{k-1} + P_k`.
///
/// Always feasible. Powers are nondecreasing in distance. The total grows
/// like `(1 + gamma*)^N`; an error is returned once it leaves the range of `T`.
pub fn solve_sic_allocation<T: Real>(
    users: &UserSet<T>,
    params: &OracleParams<T>,
) -> Result<AllocationResult<T>> {
    params.validate()?;
    let mut powers = Vec::with_capacity(users.len());
    let mut achieved = Vec::with_capacity(users.len());
    let mut sum = T::zero();
    for &r in users.distances() {
        let floor = sum + params.noise_at_bs(r);
        let p = params.sinr_target * floor;
        achieved.push(p / floor);
        powers.push(p);
        sum = sum + p;
        if !sum.is_finite() {
            return Err(Error::Domain(format!(
                "SIC powers overflow after {} of {} users; lower the SINR target or the user count",
                powers.len(),
                users.len()
            )));
        }
    }
    Ok(AllocationResult {
        powers,
        total_power: sum,
        achieved_sinr: achieved,
        mode: AllocationMode::Sic,
        feasible: true,
    })
}

/// No-SIC allocation, solved exactly.
///
/// Summing `zeta P_u = P_total + (N_th/K) r_u^eta` over the `N` users gives
/// `P_total = (N_th/K) sum r_u^eta / (zeta - N)`; feasible iff `N < zeta`.
pub fn solve_no_sic_allocation<T: Real>(
    users: &UserSet<T>,
    params: &OracleParams<T>,
) -> Result<AllocationResult<T>> {
    params.validate()?;
    let zeta = params.zeta();
    let n: T = lit(users.len() as f64);
    let slack = zeta - n;
    if !(slack > T::zero()) {
        return Ok(AllocationResult {
            powers: Vec::new(),
            total_power: T::infinity(),
            achieved_sinr: Vec::new(),
            mode: AllocationMode::NoSic,
            feasible: false,
        });
    }
    let noise_sum = users
        .distances()
        .iter()
        .fold(T::zero(), |acc, &r| acc + params.noise_at_bs(r));
    let total = noise_sum / slack;
    let powers: Vec<T> = users
        .distances()
        .iter()
        .map(|&r| (total + params.noise_at_bs(r)) / zeta)
        .collect();
    let sum = powers.iter().fold(T::zero(), |acc, &p| acc + p);
    let achieved = powers
        .iter()
        .zip(users.distances())
        .map(|(&p, &r)| p / (sum - p + params.noise_at_bs(r)))
        .collect();
    Ok(AllocationResult {
        powers,
        total_power: sum,
        achieved_sinr: achieved,
        mode: AllocationMode::NoSic,
        feasible: true,
    })
}

/// Recomputes every user's SINR from the raw powers and the pathloss gain
/// `K r^-eta`, assuming receivers of kind `mode`.
///
/// With SIC a user is interfered only by strictly nearer users (earlier in
/// tie order at equal distance); without SIC by all other users.
pub fn verify_sinr<T: Real>(
    users: &UserSet<T>,
    alloc: &AllocationResult<T>,
    params: &OracleParams<T>,
    mode: AllocationMode,
) -> Result<Vec<T>> {
    if alloc.mode != mode {
        return Err(Error::ModeMismatch {
            expected: mode.as_str(),
            found: alloc.mode.as_str(),
        });
    }
    if alloc.powers.len() != users.len() {
        return Err(Error::Domain(format!(
            "allocation has {} powers for {} users",
            alloc.powers.len(),
            users.len()
        )));
    }
    let gain = |r: T| params.pathloss_constant * r.powf(-params.pathloss_exponent);
    let powers = &alloc.powers;
    let sinr = users
        .distances()
        .iter()
        .enumerate()
        .map(|(u, &r)| {
            let interferers: T = match mode {
                AllocationMode::Sic => powers[..u].iter().fold(T::zero(), |acc, &p| acc + p),
                AllocationMode::NoSic => powers
                    .iter()
                    .enumerate()
                    .filter(|&(v, _)| v != u)
                    .fold(T::zero(), |acc, (_, &p)| acc + p),
            };
            let g = gain(r);
            powers[u] * g / (interferers * g + params.noise)
        })
        .collect();
    Ok(sinr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(g: f64) -> OracleParams<f64> {
        OracleParams {
            sinr_target: g,
            pathloss_constant: 2.66e-4,
            noise: 1e-13,
            pathloss_exponent: 3.57,
        }
    }

    fn c() -> f64 {
        1e-13 / 2.66e-4
    }

    #[test]
    fn sic_overflow_is_an_error() {
        let users = place_users_rings(500, 0.0, 50.0).unwrap();
        let err = solve_sic_allocation(&users, &params(31.0)).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("overflow")));
        assert!(solve_sic_allocation(&users, &params(0.5))
            .unwrap()
            .total_power
            .is_finite());
    }

    #[test]
    fn ring_radii() {
        let one = place_users_rings(1, 0.0, 50.0).unwrap();
        assert_relative_eq!(one.distances()[0], 50.0 / 2f64.sqrt(), max_relative = 1e-15);
        let two = place_users_rings(2, 0.0, 50.0).unwrap();
        assert_relative_eq!(two.distances()[0], 25.0, max_relative = 1e-15);
        assert_relative_eq!(two.distances()[1], 25.0 * 3f64.sqrt(), max_relative = 1e-15);
        let four = place_users_rings(4, 0.0, 1.0).unwrap();
        for (k, &r) in four.distances().iter().enumerate() {
            assert_relative_eq!(r, ((2 * k + 1) as f64 / 8.0).sqrt(), max_relative = 1e-15);
        }
        assert!(place_users_rings::<f64>(0, 0.0, 1.0).is_err());
    }

    #[test]
    fn uniform_single_user_in_range() {
        let u = place_users_uniform(1, 10.0, 50.0, 7).unwrap();
        assert!(u.distances()[0] >= 10.0 && u.distances()[0] <= 50.0);
        assert_eq!(u.seed(), Some(7));
        assert!(matches!(
            place_users_uniform::<f64>(0, 0.0, 1.0, 1),
            Err(Error::EmptyUserSet)
        ));
    }

    #[test]
    fn uniform_is_deterministic() {
        let a = place_users_uniform(100, 0.0, 50.0, 42).unwrap();
        let b = place_users_uniform(100, 0.0, 50.0, 42).unwrap();
        assert_eq!(a, b);
        let c = place_users_uniform(100, 0.0, 50.0, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_second_moment() {
        let u = place_users_uniform(100_000, 0.0, 50.0, 2024).unwrap();
        let mean_sq = u.distances().iter().map(|r| r * r).sum::<f64>() / 1e5;
        assert!((mean_sq / 1250.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn out_of_range_distance_rejected() {
        assert!(matches!(
            UserSet::from_distances(vec![5.0, 60.0], 0.0, 50.0),
            Err(Error::OutsideCell { .. })
        ));
        assert!(matches!(
            UserSet::from_distances(vec![1.0], 2.0, 50.0),
            Err(Error::OutsideCell { .. })
        ));
    }

    #[test]
    fn ties_keep_insertion_order() {
        let u = UserSet::from_distances(vec![30.0, 10.0, 30.0, 20.0], 0.0, 50.0).unwrap();
        assert_eq!(u.distances(), &[10.0, 20.0, 30.0, 30.0]);
        assert_eq!(u.tie_order(), &[1, 3, 0, 2]);
    }

    #[test]
    fn single_user_sic_and_no_sic() {
        let u = UserSet::from_distances(vec![20.0], 0.0, 50.0).unwrap();
        let want = 0.7 * c() * 20f64.powf(3.57);
        let sic = solve_sic_allocation(&u, &params(0.7)).unwrap();
        let nosic = solve_no_sic_allocation(&u, &params(0.7)).unwrap();
        assert_relative_eq!(sic.powers[0], want, max_relative = 1e-14);
        assert_relative_eq!(nosic.powers[0], want, max_relative = 1e-12);
    }

    #[test]
    fn two_user_sic_unrolled() {
        let g = 2.0;
        let u = UserSet::from_distances(vec![10.0, 30.0], 0.0, 50.0).unwrap();
        let a = solve_sic_allocation(&u, &params(g)).unwrap();
        let p1 = g * c() * 10f64.powf(3.57);
        let p2 = g * (p1 + c() * 30f64.powf(3.57));
        assert_relative_eq!(a.powers[0], p1, max_relative = 1e-14);
        assert_relative_eq!(a.powers[1], p2, max_relative = 1e-14);
        assert!(a.powers[1] > a.powers[0]);
        assert_relative_eq!(a.total_power, p1 + p2, max_relative = 1e-14);
    }

    #[test]
    fn no_sic_two_users() {
        let u = UserSet::from_distances(vec![10.0, 30.0], 0.0, 50.0).unwrap();
        let a = solve_no_sic_allocation(&u, &params(0.5)).unwrap();
        assert!(a.feasible);
        let want = c() * (10f64.powf(3.57) + 30f64.powf(3.57));
        assert_relative_eq!(a.total_power, want, max_relative = 1e-12);
        let s = verify_sinr(&u, &a, &params(0.5), AllocationMode::NoSic).unwrap();
        for v in s {
            assert_relative_eq!(v, 0.5, max_relative = 1e-10);
        }
    }

    #[test]
    fn no_sic_feasibility_boundary() {
        let u = place_users_rings(3, 0.0, 50.0).unwrap();
        let a = solve_no_sic_allocation(&u, &params(1.0)).unwrap();
        assert!(!a.feasible);
        assert!(a.powers.is_empty());
        // zeta = 3 exactly at N = 3
        assert!(!solve_no_sic_allocation(&u, &params(0.5)).unwrap().feasible);
        assert!(solve_no_sic_allocation(&u, &params(0.49)).unwrap().feasible);
    }

    #[test]
    fn verify_rejects_mode_mismatch() {
        let u = place_users_rings(3, 0.0, 50.0).unwrap();
        let a = solve_sic_allocation(&u, &params(0.1)).unwrap();
        assert!(matches!(
            verify_sinr(&u, &a, &params(0.1), AllocationMode::NoSic),
            Err(Error::ModeMismatch { .. })
        ));
    }

    #[test]
    fn perturbed_power_only_affects_that_user_and_farther() {
        let u = place_users_rings(6, 0.0, 50.0).unwrap();
        let p = params(0.3);
        let mut a = solve_sic_allocation(&u, &p).unwrap();
        a.powers[2] *= 1.01;
        let s = verify_sinr(&u, &a, &p, AllocationMode::Sic).unwrap();
        for &v in &s[..2] {
            assert_relative_eq!(v, 0.3, max_relative = 1e-12);
        }
        assert!(s[2] > 0.3);
        assert!(s[3] < 0.3);
    }

    #[test]
    fn running_sum_closed_form() {
        let u = place_users_rings(20, 0.0, 50.0).unwrap();
        let g = 0.4;
        let a = solve_sic_allocation(&u, &params(g)).unwrap();
        let mut s = 0.0;
        let mut running = 0.0;
        for (k, &r) in u.distances().iter().enumerate() {
            s = (1.0 + g) * s + g * c() * r.powf(3.57);
            running += a.powers[k];
            assert_relative_eq!(running, s, max_relative = 1e-13);
        }
    }

    #[test]
    fn recorded_sinr_equals_target() {
        let u = place_users_uniform(50, 1.0, 50.0, 9).unwrap();
        let a = solve_sic_allocation(&u, &params(0.2)).unwrap();
        for v in &a.achieved_sinr {
            assert_relative_eq!(*v, 0.2, max_relative = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn sic_allocation_independent_of_insertion_order(
            mut ds in proptest::collection::vec(0.5f64..50.0, 1..40),
            shift in 0usize..40,
        ) {
            let p = params(0.25);
            let a = solve_sic_allocation(&UserSet::from_distances(ds.clone(), 0.0, 50.0).unwrap(), &p).unwrap();
            let k = shift % ds.len();
            ds.rotate_left(k);
            ds.reverse();
            let b = solve_sic_allocation(&UserSet::from_distances(ds, 0.0, 50.0).unwrap(), &p).unwrap();
            prop_assert_eq!(a.powers, b.powers);
        }

        #[test]
        fn verify_returns_target_both_modes(seed in any::<u64>(), n in 1usize..200, g in 0.01f64..1.0) {
            let u = place_users_uniform(n, 0.0, 80.0, seed).unwrap();
            let p = params(g);
            let sic = solve_sic_allocation(&u, &p).unwrap();
            for v in verify_sinr(&u, &sic, &p, AllocationMode::Sic).unwrap() {
                prop_assert!((v / g - 1.0).abs() < 1e-10);
            }
            prop_assert!(sic.powers.windows(2).all(|w| w[0] <= w[1]));
            let g_ok = g / (n as f64);
            let p = params(g_ok);
            let nosic = solve_no_sic_allocation(&u, &p).unwrap();
            prop_assert!(nosic.feasible);
            for v in verify_sinr(&u, &nosic, &p, AllocationMode::NoSic).unwrap() {
                prop_assert!((v / g_ok - 1.0).abs() < 1e-10);
            }
        }
    }
}
