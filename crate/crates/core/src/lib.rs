//! Low-pass filtering of 3D point clouds in the spherical-harmonic domain.
//!
//! A cloud is centered, projected onto an equiangular grid as a radial
//! function `f(theta, phi)`, expanded in real spherical harmonics, damped
//! degree by degree, synthesized back and turned into points again. The crate
//! also generates filtered defense datasets, measures where perturbations sit
//! in frequency space, and ships the usual outlier-removal baselines.
//!
//! ```
//! use lpf_core::{lowpass_cloud, synthetic, FilterSpec};
//!
//! let cloud = synthetic::airplane(1024, 7);
//! let smooth = lowpass_cloud(&cloud, &FilterSpec::gaussian(20.0)?, 32, 1024, 1)?;
//! assert_eq!(smooth.len(), 1024);
//! # Ok::<(), lpf_core::Error>(())
//! ```

pub mod analysis;
pub mod cloud;
pub mod dataset;
mod error;
pub mod filter;
pub mod grid;
pub mod io;
mod kdtree;
pub mod pipeline;
pub mod preprocess;
pub mod projection;
pub mod rng;
pub mod sht;
pub mod synthetic;

pub use analysis::{dis_coef, dis_coef_from_coeffs, export_triangle, spectrum_delta, DisCoefMap};
pub use cloud::{center, to_spherical, Centroid, Point, PointCloud, SphericalCoord};
pub use dataset::{make_defense_dataset, DefenseDatasetJob, DefenseMode, Manifest};
pub use error::{Error, Result};
pub use filter::{apply_filter, degree_weights, FilterSpec};
pub use grid::{build_grid, GridSpec};
pub use io::{load_cloud, save_cloud, CloudFormat};
pub use pipeline::{lowpass_cloud, reconstruct, resample, Lowpass};
pub use preprocess::{perturb, sor, srs, PerturbKind, PerturbSpec, SorParams};
pub use projection::{project, RadialField};
pub use sht::{eval_ylm, forward_sht, inverse_sht, power_spectrum, PowerSpectrum, ShCoefficients, ShtPlan};
