//! Independent reference prices: closed form, Crank-Nicolson finite
//! differences and Monte Carlo.

pub mod closed_form;
pub mod fd;
pub mod mc;

pub use closed_form::closed_form_european;
pub use fd::{cn_fd_price, CnStepper, FdConfig};
pub use mc::{mc_price, McConfig, McResult};
