//! Constant-velocity Kalman filtering of bounding boxes.
//!
//! The state is the standard eight-dimensional box parameterization:
//! center x/y, aspect ratio (width over height), height, and the velocity
//! of each. Process and observation noise scale with the box height, so
//! the same weights work across object sizes.

use nalgebra::{SMatrix, SVector};

use super::BoundingBox;

const STD_WEIGHT_POSITION: f64 = 1.0 / 20.0;
const STD_WEIGHT_VELOCITY: f64 = 1.0 / 160.0;

type Vec8 = SVector<f64, 8>;
type Mat8 = SMatrix<f64, 8, 8>;
type Vec4 = SVector<f64, 4>;
type Mat4 = SMatrix<f64, 4, 4>;
type Mat4x8 = SMatrix<f64, 4, 8>;

fn transition() -> Mat8 {
    let mut f = Mat8::identity();
    for i in 0..4 {
        f[(i, i + 4)] = 1.0;
    }
    f
}

fn observation() -> Mat4x8 {
    let mut h = Mat4x8::zeros();
    for i in 0..4 {
        h[(i, i)] = 1.0;
    }
    h
}

fn measurement_of(bbox: &BoundingBox) -> Vec4 {
    Vec4::new(
        bbox.x + bbox.w / 2.0,
        bbox.y + bbox.h / 2.0,
        bbox.w / bbox.h,
        bbox.h,
    )
}

/// Filter state for one tracked box: mean and covariance of
/// `(cx, cy, aspect, height)` and their per-frame velocities.
#[derive(Debug, Clone)]
pub struct KalmanState {
    mean: Vec8,
    covariance: Mat8,
}

impl KalmanState {
    /// Start a filter at an observed box with zero velocity and a
    /// deliberately loose velocity prior.
    pub fn initiate(bbox: &BoundingBox) -> Self {
        let z = measurement_of(bbox);
        let mut mean = Vec8::zeros();
        for i in 0..4 {
            mean[i] = z[i];
        }
        let h = z[3];
        let std = [
            2.0 * STD_WEIGHT_POSITION * h,
            2.0 * STD_WEIGHT_POSITION * h,
            1e-2,
            2.0 * STD_WEIGHT_POSITION * h,
            10.0 * STD_WEIGHT_VELOCITY * h,
            10.0 * STD_WEIGHT_VELOCITY * h,
            1e-5,
            10.0 * STD_WEIGHT_VELOCITY * h,
        ];
        let covariance = Mat8::from_diagonal(&Vec8::from_iterator(std.iter().map(|s| s * s)));
        KalmanState { mean, covariance }
    }

    /// Advance one frame under the constant-velocity model.
    pub fn predict(&mut self) {
        let h = self.mean[3];
        let std = [
            STD_WEIGHT_POSITION * h,
            STD_WEIGHT_POSITION * h,
            1e-2,
            STD_WEIGHT_POSITION * h,
            STD_WEIGHT_VELOCITY * h,
            STD_WEIGHT_VELOCITY * h,
            1e-5,
            STD_WEIGHT_VELOCITY * h,
        ];
        let process_noise = Mat8::from_diagonal(&Vec8::from_iterator(std.iter().map(|s| s * s)));
        let f = transition();
        self.mean = f * self.mean;
        self.covariance = f * self.covariance * f.transpose() + process_noise;
    }

    /// Fold an observed box into the state.
    pub fn update(&mut self, bbox: &BoundingBox) {
        let z = measurement_of(bbox);
        let h = self.mean[3];
        let std = [
            STD_WEIGHT_POSITION * h,
            STD_WEIGHT_POSITION * h,
            1e-1,
            STD_WEIGHT_POSITION * h,
        ];
        let obs_noise = Mat4::from_diagonal(&Vec4::from_iterator(std.iter().map(|s| s * s)));
        let hm = observation();
        let innovation_cov = hm * self.covariance * hm.transpose() + obs_noise;
        let inv = innovation_cov
            .try_inverse()
            .expect("innovation covariance is positive definite");
        let gain = self.covariance * hm.transpose() * inv;
        let innovation = z - hm * self.mean;
        self.mean += gain * innovation;
        self.covariance = (Mat8::identity() - gain * hm) * self.covariance;
    }

    /// The state mean as a bounding box (extents clamped positive so a
    /// degenerate filter state still yields a valid box).
    pub fn bbox(&self) -> BoundingBox {
        let (cx, cy, aspect) = (self.mean[0], self.mean[1], self.mean[2]);
        let h = self.mean[3].max(1e-6);
        let w = (aspect * h).max(1e-6);
        BoundingBox::new(cx - w / 2.0, cy - h / 2.0, w, h).expect("clamped extents are positive")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: f64, y: f64) -> BoundingBox {
        BoundingBox::new(x, y, 40.0, 50.0).unwrap()
    }

    #[test]
    fn single_observation_predicts_in_place() {
        let start = b(100.0, 60.0);
        let mut k = KalmanState::initiate(&start);
        k.predict();
        let p = k.bbox();
        assert!((p.x - start.x).abs() < 1e-9);
        assert!((p.y - start.y).abs() < 1e-9);
        assert!((p.w - start.w).abs() < 1e-9);
        assert!((p.h - start.h).abs() < 1e-9);
    }

    #[test]
    fn two_observations_track_constant_motion_within_a_pixel() {
        // Boxes moving +10 px/frame in x. With only one velocity update the
        // filter stays conservative: the prediction lands within a pixel of
        // the last observation plus the small learned velocity.
        let mut k = KalmanState::initiate(&b(0.0, 60.0));
        k.predict();
        k.update(&b(10.0, 60.0));
        k.predict();
        let predicted_cx = k.bbox().x + k.bbox().w / 2.0;
        let second_cx = 10.0 + 20.0;
        assert!(
            (predicted_cx - second_cx).abs() <= 1.0,
            "prediction {predicted_cx} strayed from {second_cx}"
        );
        // And it must have moved forward, not backward.
        assert!(predicted_cx > second_cx);
    }

    #[test]
    fn stationary_object_converges_within_half_a_pixel() {
        let fixed = b(200.0, 100.0);
        let mut k = KalmanState::initiate(&fixed);
        for _ in 0..10 {
            k.predict();
            k.update(&fixed);
        }
        k.predict();
        let p = k.bbox();
        assert!((p.x - fixed.x).abs() < 0.5);
        assert!((p.y - fixed.y).abs() < 0.5);
    }

    #[test]
    fn velocity_estimate_converges_over_repeated_motion() {
        let mut k = KalmanState::initiate(&b(0.0, 60.0));
        for t in 1..=12 {
            k.predict();
            k.update(&b(10.0 * t as f64, 60.0));
        }
        k.predict();
        let predicted_cx = k.bbox().x + k.bbox().w / 2.0;
        let truth_cx = 10.0 * 13.0 + 20.0;
        assert!(
            (predicted_cx - truth_cx).abs() < 1.0,
            "converged filter predicted {predicted_cx}, truth {truth_cx}"
        );
    }
}
