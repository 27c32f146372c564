use std::marker::PhantomData;

use crate::scalar::Scalar;

/// A vertex program: the only programming surface of the engine.
///
/// For each destination vertex the engine calls `gather` once per in-edge
/// with the source's state and the edge weight, folds the messages with
/// `combine` starting from `identity`, then calls `apply` with the folded
/// message and the vertex's previous state. `combine` must be associative
/// and commutative with `identity` as its neutral element; the engine
/// still fixes the fold order so results are reproducible.
pub trait GatherApply<T: Scalar>: Sync {
    type State: Clone + Send + Sync;

    fn gather(&self, neighbor: &Self::State, weight: T) -> T;
    fn combine(&self, a: T, b: T) -> T;
    fn identity(&self) -> T;
    fn apply(&self, gathered: T, old: &Self::State) -> Self::State;
}

/// Matrix-vector product: gather `s * w`, sum, overwrite.
#[derive(Debug, Clone, Copy, Default)]
pub struct SumProduct;

impl<T: Scalar> GatherApply<T> for SumProduct {
    type State = T;

    #[inline]
    fn gather(&self, neighbor: &T, weight: T) -> T {
        *neighbor * weight
    }
    #[inline]
    fn combine(&self, a: T, b: T) -> T {
        a + b
    }
    #[inline]
    fn identity(&self) -> T {
        T::zero()
    }
    #[inline]
    fn apply(&self, gathered: T, _old: &T) -> T {
        gathered
    }
}

/// A program assembled from closures.
pub struct FnProgram<T, S, G, C, A> {
    identity: T,
    gather: G,
    combine: C,
    apply: A,
    _state: PhantomData<fn() -> S>,
}

/// Builds a [`GatherApply`] program from closures.
///
/// ```
/// use g4s::engine::{program, GatherApply};
/// let max_weight = program(f64::NEG_INFINITY, |_s: &f64, w| w, f64::max, |m, _old: &f64| m);
/// assert_eq!(max_weight.combine(1.0, 3.0), 3.0);
/// ```
pub fn program<T, S, G, C, A>(identity: T, gather: G, combine: C, apply: A) -> FnProgram<T, S, G, C, A>
where
    T: Scalar,
    S: Clone + Send + Sync,
    G: Fn(&S, T) -> T + Sync,
    C: Fn(T, T) -> T + Sync,
    A: Fn(T, &S) -> S + Sync,
{
    FnProgram { identity, gather, combine, apply, _state: PhantomData }
}

impl<T, S, G, C, A> GatherApply<T> for FnProgram<T, S, G, C, A>
where
    T: Scalar,
    S: Clone + Send + Sync,
    G: Fn(&S, T) -> T + Sync,
    C: Fn(T, T) -> T + Sync,
    A: Fn(T, &S) -> S + Sync,
{
    type State = S;

    fn gather(&self, neighbor: &S, weight: T) -> T {
        (self.gather)(neighbor, weight)
    }
    fn combine(&self, a: T, b: T) -> T {
        (self.combine)(a, b)
    }
    fn identity(&self) -> T {
        self.identity
    }
    fn apply(&self, gathered: T, old: &S) -> S {
        (self.apply)(gathered, old)
    }
}

/// Which declared combiner law a sample broke.
#[derive(Debug, Clone, PartialEq)]
pub enum CombinerLaw {
    Identity,
    Commutativity,
    Associativity,
}

/// Spot-checks the combiner contract on `samples`, comparing with relative
/// tolerance `tol`.
pub fn check_combiner<T: Scalar, P: GatherApply<T>>(prog: &P, samples: &[T], tol: f64) -> Result<(), (CombinerLaw, Vec<T>)> {
    let close = |a: T, b: T| {
        let scale = a.modulus().max(b.modulus()).max(1.0);
        (a - b).modulus() <= tol * scale || a == b
    };
    let id = prog.identity();
    for &x in samples {
        if prog.combine(id, x) != x || prog.combine(x, id) != x {
            return Err((CombinerLaw::Identity, vec![x]));
        }
    }
    for &a in samples {
        for &b in samples {
            if !close(prog.combine(a, b), prog.combine(b, a)) {
                return Err((CombinerLaw::Commutativity, vec![a, b]));
            }
            for &c in samples.iter().take(8) {
                let left = prog.combine(prog.combine(a, b), c);
                let right = prog.combine(a, prog.combine(b, c));
                if !close(left, right) {
                    return Err((CombinerLaw::Associativity, vec![a, b, c]));
                }
            }
        }
    }
    Ok(())
}
