//! Real-argument special functions.
//!
//! Every function validates its domain and reports violations as
//! [`Error::Domain`](crate::Error::Domain) instead of returning NaN.

pub mod bessel;
pub mod gamma;
pub mod hypergeometric;
pub mod meijer;

pub use bessel::{bessel_i, bessel_i_scaled, bessel_k, bessel_k_scaled, ln_bessel_i, ln_bessel_k};
pub use gamma::{beta, digamma, gamma, log_beta, log_gamma, log_gamma_complex, upper_incomplete_gamma};
pub use hypergeometric::{p_f_q, SeriesControl};
pub use meijer::{ln_meijer_g_measure, meijer_g_measure};
