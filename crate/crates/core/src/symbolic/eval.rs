use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::symbol::{Base, Symbol};

/// Values of `u`, `v` and their `t`-derivative jets at one parameter value.
///
/// `jets[k]` holds the k-th derivatives ordered `(u1, u2, u3, v1, v2, v3)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointState<T> {
    jets: Vec<[T; 6]>,
}

impl<T: Clone> PointState<T> {
    pub fn new(u: [T; 3], v: [T; 3]) -> Self {
        PointState {
            jets: vec![join(u, v)],
        }
    }

    pub fn from_jets(jets: Vec<[T; 6]>) -> Self {
        assert!(!jets.is_empty(), "a point needs its order-0 values");
        PointState { jets }
    }

    /// Sets the derivative jet of the given order. Lower orders must exist.
    pub fn with_jet(mut self, order: usize, u: [T; 3], v: [T; 3]) -> Self {
        assert!(order >= 1 && order <= self.jets.len(), "jets must be filled in order");
        let jet = join(u, v);
        if order == self.jets.len() {
            self.jets.push(jet);
        } else {
            self.jets[order] = jet;
        }
        self
    }

    pub fn value(&self, s: Symbol) -> Option<&T> {
        self.jets.get(s.order as usize).map(|j| &j[s.base.index()])
    }

    pub fn values(&self) -> &[T; 6] {
        &self.jets[0]
    }

    pub fn jet(&self, order: usize) -> Option<&[T; 6]> {
        self.jets.get(order)
    }

    pub fn jets(&self) -> &[[T; 6]] {
        &self.jets
    }

    pub fn orders(&self) -> usize {
        self.jets.len()
    }

    pub fn u(&self) -> [T; 3] {
        let j = &self.jets[0];
        [j[0].clone(), j[1].clone(), j[2].clone()]
    }

    pub fn v(&self) -> [T; 3] {
        let j = &self.jets[0];
        [j[3].clone(), j[4].clone(), j[5].clone()]
    }

    pub fn map<S: Clone>(&self, f: impl Fn(&T) -> S) -> PointState<S> {
        PointState {
            jets: self
                .jets
                .iter()
                .map(|j| std::array::from_fn(|i| f(&j[i])))
                .collect(),
        }
    }
}

impl<T: Clone + Zero> PointState<T> {
    /// First coordinate (in `u1..v3` order) that is zero, if any.
    pub fn zero_coordinate(&self) -> Option<Base> {
        self.jets[0]
            .iter()
            .position(|x| x.is_zero())
            .and_then(Base::from_index)
    }
}

impl PointState<BigRational> {
    pub fn to_f64(&self) -> PointState<f64> {
        self.map(super::rational::rational_to_f64)
    }

    pub fn from_i64(u: [i64; 3], v: [i64; 3]) -> Self {
        let r = |x: i64| BigRational::from_integer(BigInt::from(x));
        PointState::new(u.map(r), v.map(r))
    }
}

impl PointState<f64> {
    /// Exact rational image of every stored double.
    pub fn to_exact(&self) -> Option<PointState<BigRational>> {
        let jets = self
            .jets
            .iter()
            .map(|j| {
                let mut out: [BigRational; 6] = std::array::from_fn(|_| BigRational::zero());
                for (o, x) in out.iter_mut().zip(j) {
                    *o = BigRational::from_float(*x)?;
                }
                Some(out)
            })
            .collect::<Option<Vec<_>>>()?;
        Some(PointState { jets })
    }

    /// Flattened values indexed by [`Symbol::var`].
    pub fn flat(&self) -> Vec<f64> {
        self.jets.iter().flat_map(|j| j.iter().copied()).collect()
    }
}

fn join<T: Clone>(u: [T; 3], v: [T; 3]) -> [T; 6] {
    let [a, b, c] = u;
    let [d, e, f] = v;
    [a, b, c, d, e, f]
}
