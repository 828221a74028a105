//! Local-perspective geometry of upright 3D boxes seen by a pinhole camera.
//!
//! The projected heights of a box's four vertical edges ("keyedges") shrink
//! with depth. Their ratios, together with the box's length and width, pin
//! down the object's depth and egocentric yaw in closed form, with no
//! dependence on the focal length. This crate provides:
//!
//! - [`geometry`]: frame conventions, keyedge construction and projection.
//! - [`indexing`]: camera-centric keyedge indexing and allocentric groups.
//! - [`recovery`]: closed-form depth and yaw from a ratio tuple.
//! - [`uncertainty`]: first-order depth spread, inverse-spread fusion and the
//!   uncertainty-aware loss.
//! - [`metrics`]: 2D matching and the average relative depth error (ARDE).
//! - [`data`]: KITTI labels and calibration, synthetic scenes, noise models
//!   and the record formats used by the `keyedge` binary.
//! - [`sensitivity`]: Monte Carlo study of depth error under height noise.
//!
//! ```
//! use keyedge::geometry::{project_keyedges, keyedge_ratios, BoxPose3D, CameraIntrinsics, Dims, Vec3};
//! use keyedge::recovery::solve_all;
//!
//! let pose = BoxPose3D::new(Vec3::new(1.5, 0.9, 14.0), Dims::new(4.2, 1.7, 1.5), 0.6)?;
//! let camera = CameraIntrinsics::new(721.5, 609.6, 172.9)?;
//! let ratios = keyedge_ratios(&project_keyedges(&pose, &camera)?)?;
//! let solved = solve_all(&ratios.tuples(), pose.dims.l, pose.dims.w)?;
//! for estimate in &solved.estimates {
//!     assert!((estimate.d_obj - 14.0).abs() < 1e-9);
//!     assert!((estimate.theta - 0.6).abs() < 1e-9);
//! }
//! # Ok::<(), keyedge::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod geometry;
pub mod indexing;
pub mod metrics;
pub mod pipeline;
pub mod recovery;
pub mod sensitivity;
pub mod uncertainty;

pub use error::{Error, Result};
