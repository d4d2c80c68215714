//! Special functions needed by the maximal-ratio-combining closed forms.
//!
//! Only the parameter families that occur in the rate and outage expressions
//! are supported: the Meijer-G routines evaluate a Mellin–Barnes integral on a
//! straight vertical contour with the trapezoid rule, which converges
//! geometrically for integrands analytic in a strip around the contour.

mod gamma;
mod hypergeometric;
mod meijer;

pub use gamma::{ln_gamma, pochhammer};
pub use hypergeometric::gauss_2f1;
pub use meijer::{egbmgf, meijer_g, EgbmgfSpec, GammaBlock, MeijerGSpec};
