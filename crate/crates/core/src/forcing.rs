/// Space-time source terms added to the right-hand sides, e.g. for
/// manufactured-solution tests. Components are `(f_v, f_u, f_S)`; the
/// parabolic solver ignores `f_S`.
pub trait Forcing: Send + Sync {
    fn eval(&self, t: f64, x: f64) -> [f64; 3];
}

impl<F> Forcing for F
where
    F: Fn(f64, f64) -> [f64; 3] + Send + Sync,
{
    fn eval(&self, t: f64, x: f64) -> [f64; 3] {
        self(t, x)
    }
}
