//! Shared fixtures for the benchmark targets.

use num_bigint::BigInt;
use num_rational::BigRational;

use coarse_dyn::Window;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn squares_window() -> Window {
    Window::halfline(rat(1, 1), rat(100, 1), rat(1, 8)).unwrap()
}

pub fn strip_window() -> Window {
    Window::strip(rat(64, 1), rat(1, 4)).unwrap()
}

pub fn grid_window() -> Window {
    Window::grid(1, 16, rat(8, 1), rat(1, 2)).unwrap()
}
