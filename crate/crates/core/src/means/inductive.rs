use crate::error::{argument, Result};
use crate::geometry::HadamardSpace;

/// Running inductive mean `S_n = S_{n-1} #_{1/n} a_n`.
///
/// `diameter_bound` is a running lower estimate of the diameter of the
/// sequence seen so far: the largest `δ(S_{k}, a_{k+1})` observed. Every such
/// distance is bounded by the true diameter, so the estimate never overshoots.
#[derive(Debug, Clone)]
pub struct InductiveState<P> {
    pub n: usize,
    pub current: P,
    pub diameter_bound: f64,
}

impl<P: Clone> InductiveState<P> {
    /// `S_1 = a_1`.
    pub fn start<S: HadamardSpace<Point = P>>(space: &S, first: P) -> Result<Self> {
        space.validate(&first)?;
        Ok(Self { n: 1, current: first, diameter_bound: 0.0 })
    }

    /// Folds in the next sequence element.
    pub fn push<S: HadamardSpace<Point = P>>(&mut self, space: &S, next: &P) -> Result<()> {
        let t = 1.0 / (self.n as f64 + 1.0);
        let (p, d) = space.geodesic_with_distance(&self.current, next, t)?;
        self.current = p;
        self.n += 1;
        self.diameter_bound = self.diameter_bound.max(d);
        Ok(())
    }
}

/// One step of the inductive mean; `state.n` grows by exactly one.
pub fn inductive_step<S: HadamardSpace>(
    space: &S,
    mut state: InductiveState<S::Point>,
    next: &S::Point,
) -> Result<InductiveState<S::Point>> {
    state.push(space, next)?;
    Ok(state)
}

/// `S_n` of a finite nonempty sequence.
pub fn inductive_mean<S: HadamardSpace>(space: &S, seq: &[S::Point]) -> Result<S::Point> {
    let (first, rest) = seq.split_first().ok_or_else(|| argument("inductive mean of an empty sequence"))?;
    let mut state = InductiveState::start(space, first.clone())?;
    for p in rest {
        state.push(space, p)?;
    }
    Ok(state.current)
}

/// All prefixes `[S_1, …, S_n]`.
pub fn inductive_prefixes<S: HadamardSpace>(space: &S, seq: &[S::Point]) -> Result<Vec<S::Point>> {
    let (first, rest) = seq.split_first().ok_or_else(|| argument("inductive mean of an empty sequence"))?;
    let mut out = Vec::with_capacity(seq.len());
    let mut state = InductiveState::start(space, first.clone())?;
    out.push(state.current.clone());
    for p in rest {
        state.push(space, p)?;
        out.push(state.current.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Euclidean, Spd, SpdPoint};

    #[test]
    fn euclidean_running_means() {
        let e = Euclidean::new(1);
        let seq: Vec<_> = [0.0, 3.0, 6.0].iter().map(|&x| e.point(&[x]).unwrap()).collect();
        let s = inductive_prefixes(&e, &seq).unwrap();
        assert_eq!(s[0][0], 0.0);
        assert_eq!(s[1][0], 1.5);
        assert_eq!(s[2][0], 3.0);
    }

    #[test]
    fn constant_sequence_is_fixed() {
        let e = Euclidean::new(2);
        let x = e.point(&[1.25, -4.0]).unwrap();
        let mut st = InductiveState::start(&e, x.clone()).unwrap();
        for k in 0..100 {
            st = inductive_step(&e, st, &x).unwrap();
            assert_eq!(st.n, k + 2);
            assert_eq!(st.current, x);
        }
        assert_eq!(st.diameter_bound, 0.0);
    }

    #[test]
    fn spd_two_step_is_midpoint() {
        let s = Spd::new(2);
        let seq = vec![
            SpdPoint::from_diagonal(&[1.0, 1.0]).unwrap(),
            SpdPoint::from_diagonal(&[4.0, 4.0]).unwrap(),
        ];
        let m = inductive_mean(&s, &seq).unwrap();
        let want = SpdPoint::from_diagonal(&[2.0, 2.0]).unwrap();
        assert!(s.distance(&m, &want).unwrap() < 1e-12);
    }

    #[test]
    fn empty_sequence_is_an_error() {
        let e = Euclidean::new(1);
        assert!(matches!(inductive_mean(&e, &[]), Err(crate::Error::Argument(_))));
    }

    #[test]
    fn diameter_bound_is_monotone_and_below_diameter() {
        let e = Euclidean::new(1);
        let xs = [0.0, 5.0, -1.0, 2.0, 2.0, 9.0];
        let mut st = InductiveState::start(&e, e.point(&[xs[0]]).unwrap()).unwrap();
        let mut last = 0.0;
        for &x in &xs[1..] {
            st.push(&e, &e.point(&[x]).unwrap()).unwrap();
            assert!(st.diameter_bound >= last);
            last = st.diameter_bound;
        }
        assert!(st.diameter_bound <= 10.0);
    }
}
