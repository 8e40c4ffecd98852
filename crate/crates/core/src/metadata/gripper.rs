//! Gripper-signal smoothing and open/close event detection.

use super::record::Step;

/// Width of the centered moving average applied to the gripper signal.
pub const GRIPPER_WINDOW: usize = 15;
/// Smoothed values at or above this count as closed.
pub const GRIPPER_CLOSE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GripperEvent {
    Close,
    Open,
}

/// Centered moving average of odd `width`, truncated (not padded) at the ends:
/// each output averages only the samples that exist inside its window.
pub fn smooth(signal: &[f64], width: usize) -> Vec<f64> {
    assert!(width % 2 == 1, "window width must be odd");
    let half = width / 2;
    let n = signal.len();
    // direct per-window sums: prefix sums drift over long signals and can
    // flip values sitting exactly on the threshold
    (0..n)
        .map(|i| {
            let window = &signal[i.saturating_sub(half)..=(i + half).min(n - 1)];
            window.iter().sum::<f64>() / window.len() as f64
        })
        .collect()
}

/// Indices where the thresholded smoothed signal changes state, with the
/// state entered at that index. Index 0 never carries an event.
pub fn transitions(signal: &[f64]) -> Vec<(usize, GripperEvent)> {
    let smoothed = smooth(signal, GRIPPER_WINDOW);
    let closed: Vec<bool> = smoothed.iter().map(|v| *v >= GRIPPER_CLOSE_THRESHOLD).collect();
    closed
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != w[1])
        .map(|(i, w)| {
            let ev = if w[1] { GripperEvent::Close } else { GripperEvent::Open };
            (i + 1, ev)
        })
        .collect()
}

/// First index where the smoothed signal crosses the close threshold from below.
pub fn first_close(signal: &[f64]) -> Option<usize> {
    transitions(signal)
        .into_iter()
        .find(|(_, ev)| *ev == GripperEvent::Close)
        .map(|(i, _)| i)
}

/// End-effector position at the first smoothed gripper close, used as the
/// position of the manipulated object. `None` when the gripper never closes.
pub fn extract_object_position(steps: &[Step]) -> Option<[f64; 3]> {
    let signal: Vec<f64> = steps.iter().map(|s| s.gripper).collect();
    first_close(&signal).map(|i| steps[i].ee_pos)
}
