//! Visual odometry geometry toolkit.
//!
//! The crate implements a model-free frame-to-frame rotation solver over
//! epipolar-plane normals, the view-synthesis loss operators used to train
//! unsupervised depth/pose networks, RANSAC scale alignment of two-view
//! translations against depth maps, and the full trajectory-evaluation
//! protocol (7DoF alignment, ATE, RPE and KITTI segment drift). Depth maps,
//! pose predictions and 2D matches are consumed from files; no networks live
//! here.

pub mod eigen;
pub mod eval;
pub mod f2f;
pub mod image;
pub mod io;
pub mod losses;
pub mod rng;
pub mod scale;
pub mod se3;
pub mod synth;

pub use se3::{
    so3_exp, so3_log, AxisAngle, CameraIntrinsics, GeomError, Pixel, RigidMotion, Rotation,
};
