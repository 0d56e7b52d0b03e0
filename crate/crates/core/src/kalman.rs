//! Constant-velocity Kalman filter over box state.
//!
//! State is the 8-vector `(cx, cy, w, h, vcx, vcy, vw, vh)` in pixels and
//! pixels/frame. Noise standard deviations scale with the current box
//! height, the convention of SORT-family trackers: measurement and process
//! position stds are `position_weight * h` and process velocity stds are
//! `velocity_weight * h` per frame. All operations are pure value
//! transformations, so identical call sequences produce bit-identical
//! states.

use crate::error::{Error, Result};
use crate::mot::BBox;
use crate::scalar::{real, Real, Scalar};

pub const STATE_DIM: usize = 8;
pub const MEAS_DIM: usize = 4;

/// Noise scales of the filter, exposed as tracker hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KalmanParams<T: Real = Scalar> {
    /// Std of measured and process position/size noise, as a fraction of box height.
    pub position_weight: T,
    /// Std of process velocity noise per frame, as a fraction of box height.
    pub velocity_weight: T,
}

impl<T: Real> Default for KalmanParams<T> {
    fn default() -> Self {
        Self { position_weight: real(1.0 / 20.0), velocity_weight: real(1.0 / 160.0) }
    }
}

/// Filter state: mean vector plus symmetric positive semi-definite covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanState<T: Real = Scalar> {
    pub mean: [T; STATE_DIM],
    pub covariance: [[T; STATE_DIM]; STATE_DIM],
}

/// Initializes a state from a first observation: box center and size with
/// zero velocities, diagonal covariance with position stds proportional to
/// the box height and velocity stds ten times larger.
pub fn kf_init<T: Real>(bbox: &BBox<T>, params: &KalmanParams<T>) -> KalmanState<T> {
    let (cx, cy) = bbox.center();
    let h = bbox.height;
    let two = real::<T>(2.0);
    let ten = real::<T>(10.0);
    let pos_std = two * params.position_weight * h;
    let vel_std = ten * params.velocity_weight * h;

    let mean = [cx, cy, bbox.width, bbox.height, T::zero(), T::zero(), T::zero(), T::zero()];
    let mut covariance = [[T::zero(); STATE_DIM]; STATE_DIM];
    for i in 0..MEAS_DIM {
        covariance[i][i] = pos_std * pos_std;
        covariance[i + MEAS_DIM][i + MEAS_DIM] = vel_std * vel_std;
    }
    KalmanState { mean, covariance }
}

/// Advances the state one frame under the constant-velocity model and grows
/// the covariance by the process noise.
pub fn kf_predict<T: Real>(state: &KalmanState<T>, params: &KalmanParams<T>) -> KalmanState<T> {
    let h = state.mean[3];
    let pos_std = params.position_weight * h;
    let vel_std = params.velocity_weight * h;

    let mut mean = state.mean;
    for i in 0..MEAS_DIM {
        mean[i] += mean[i + MEAS_DIM];
    }

    // P' = F P F^T + Q with F = [[I, I], [0, I]] and diagonal Q.
    let p = &state.covariance;
    let mut cov = [[T::zero(); STATE_DIM]; STATE_DIM];
    let vel = |i: usize| if i < MEAS_DIM { i + MEAS_DIM } else { i };
    for i in 0..STATE_DIM {
        for j in 0..STATE_DIM {
            let mut v = p[i][j];
            if i < MEAS_DIM {
                v += p[vel(i)][j];
            }
            if j < MEAS_DIM {
                v += p[i][vel(j)];
            }
            if i < MEAS_DIM && j < MEAS_DIM {
                v += p[vel(i)][vel(j)];
            }
            cov[i][j] = v;
        }
    }
    for i in 0..MEAS_DIM {
        cov[i][i] += pos_std * pos_std;
        cov[i + MEAS_DIM][i + MEAS_DIM] += vel_std * vel_std;
    }
    KalmanState { mean, covariance: cov }
}

/// Corrects the state against a measured box `(cx, cy, w, h)`.
///
/// The returned covariance is re-symmetrized and the mean's width/height are
/// clamped to at least one pixel.
#[allow(clippy::needless_range_loop)] // index pairs address both triangles
pub fn kf_update<T: Real>(
    state: &KalmanState<T>,
    measurement: &BBox<T>,
    params: &KalmanParams<T>,
) -> Result<KalmanState<T>> {
    if !measurement.is_valid() {
        return Err(Error::Numeric("kalman update with non-finite or degenerate box".to_string()));
    }
    let (mx, my) = measurement.center();
    let z = [mx, my, measurement.width, measurement.height];

    let h = state.mean[3];
    let meas_std = params.position_weight * h;
    let r = meas_std * meas_std;

    let p = &state.covariance;
    // S = H P H^T + R where H selects the first four state components.
    let mut s = [[T::zero(); MEAS_DIM]; MEAS_DIM];
    for i in 0..MEAS_DIM {
        for j in 0..MEAS_DIM {
            s[i][j] = p[i][j];
        }
        s[i][i] += r;
    }
    let s_inv = invert4(&s)?;

    // K = P H^T S^-1, an 8x4 gain.
    let mut gain = [[T::zero(); MEAS_DIM]; STATE_DIM];
    for i in 0..STATE_DIM {
        for j in 0..MEAS_DIM {
            let mut acc = T::zero();
            for k in 0..MEAS_DIM {
                acc += p[i][k] * s_inv[k][j];
            }
            gain[i][j] = acc;
        }
    }

    let mut mean = state.mean;
    for i in 0..STATE_DIM {
        let mut acc = T::zero();
        for j in 0..MEAS_DIM {
            acc += gain[i][j] * (z[j] - state.mean[j]);
        }
        mean[i] += acc;
    }
    mean[2] = mean[2].max(T::one());
    mean[3] = mean[3].max(T::one());

    // P' = P - K S K^T, then re-symmetrized against rounding drift.
    let mut ks = [[T::zero(); MEAS_DIM]; STATE_DIM];
    for i in 0..STATE_DIM {
        for j in 0..MEAS_DIM {
            let mut acc = T::zero();
            for k in 0..MEAS_DIM {
                acc += gain[i][k] * s[k][j];
            }
            ks[i][j] = acc;
        }
    }
    let mut cov = state.covariance;
    for i in 0..STATE_DIM {
        for j in 0..STATE_DIM {
            let mut acc = T::zero();
            for k in 0..MEAS_DIM {
                acc += ks[i][k] * gain[j][k];
            }
            cov[i][j] -= acc;
        }
    }
    let half = real::<T>(0.5);
    for i in 0..STATE_DIM {
        for j in (i + 1)..STATE_DIM {
            let v = (cov[i][j] + cov[j][i]) * half;
            cov[i][j] = v;
            cov[j][i] = v;
        }
    }

    Ok(KalmanState { mean, covariance: cov })
}

/// Box described by the state mean, with width and height clamped to at
/// least one pixel so downstream IoU stays well-defined.
pub fn state_bbox<T: Real>(state: &KalmanState<T>) -> BBox<T> {
    let w = state.mean[2].max(T::one());
    let h = state.mean[3].max(T::one());
    BBox::from_center(state.mean[0], state.mean[1], w, h)
}

/// Gauss-Jordan inverse of a 4x4 matrix with partial pivoting.
fn invert4<T: Real>(m: &[[T; 4]; 4]) -> Result<[[T; 4]; 4]> {
    let mut a = *m;
    let mut inv = [[T::zero(); 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = T::one();
    }
    for col in 0..4 {
        let mut pivot = col;
        for row in (col + 1)..4 {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() <= T::zero() {
            return Err(Error::Numeric("singular innovation covariance".to_string()));
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        for j in 0..4 {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for row in 0..4 {
            if row == col {
                continue;
            }
            let f = a[row][col];
            if f != T::zero() {
                for j in 0..4 {
                    a[row][j] -= f * a[col][j];
                    inv[row][j] -= f * inv[col][j];
                }
            }
        }
    }
    Ok(inv)
}
