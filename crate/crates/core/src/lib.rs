//! Quantum states of light through lossy and amplifying linear optical
//! devices.
//!
//! A device with transmission matrix `T` and noise coupling `A` maps field
//! amplitudes as `b = T·a + A·d`, where `d` is a device annihilation operator
//! for absorbers and a creation operator for amplifiers. The [`device`]
//! module builds the (pseudo-)unitary field+device dilation, [`gaussian`]
//! pushes Gaussian states through it in phase space, and [`fock`] repeats the
//! same channels by brute force in a truncated photon-number basis so the two
//! can be compared.
//!
//! The main physical consequence shows up immediately: a coherent state stays
//! coherent under loss, but picks up `g² - 1` thermal photons under gain, so
//! loss followed by compensating gain restores the mean amplitude and never
//! the state.
//!
//! ```
//! use qgls::{gaussian, network, numerics::c};
//!
//! let input = gaussian::coherent_state(&[c(3.0, 3.0)]);
//! let lossy = gaussian::apply_device(&input, &network::loss(2.0 / 3.0)?, &[0], 1e-10)?;
//! let out = gaussian::apply_device(&lossy, &network::gain(1.5)?, &[0], 1e-10)?;
//! assert!((out.mean()[0] - c(3.0, 3.0)).norm() < 1e-12);
//! assert!((gaussian::purity(&out) - 1.0 / 3.5).abs() < 1e-12);
//! # Ok::<(), qgls::Error>(())
//! ```
//!
//! Runnable walkthroughs live in `examples/`; the `qgls` binary exposes the
//! same functionality on JSON pipeline files.

pub mod cli;
pub mod device;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod network;
pub mod numerics;

pub use error::{Error, Result};
