use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BufferState {
    Filling { filled: usize, capacity: usize },
    Ready,
}

/// Fixed-capacity sliding window over one or more synchronous channels.
#[derive(Debug, Clone)]
pub struct SignalBuffer {
    capacity: usize,
    fs: f64,
    channels: Vec<VecDeque<f64>>,
    pushed: usize,
}

impl SignalBuffer {
    pub fn new(channels: usize, capacity: usize, fs: f64) -> Result<Self> {
        if channels == 0 || capacity == 0 {
            return Err(Error::Argument(
                "buffer needs at least one channel and one sample of capacity".into(),
            ));
        }
        Ok(SignalBuffer {
            capacity,
            fs,
            channels: vec![VecDeque::with_capacity(capacity); channels],
            pushed: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn channels(&self) -> usize {
        self.channels.len()
    }

    pub fn filled(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_ready(&self) -> bool {
        self.filled() == self.capacity
    }

    /// Total samples pushed per channel since creation.
    pub fn pushed(&self) -> usize {
        self.pushed
    }

    /// Sample index (since creation) of the oldest buffered sample.
    pub fn window_start(&self) -> usize {
        self.pushed - self.filled()
    }

    fn state(&self) -> BufferState {
        if self.is_ready() {
            BufferState::Ready
        } else {
            BufferState::Filling {
                filled: self.filled(),
                capacity: self.capacity,
            }
        }
    }

    /// Appends one sample per channel, evicting the oldest when full.
    pub fn push_frame(&mut self, values: &[f64]) -> Result<BufferState> {
        if values.len() != self.channels.len() {
            return Err(Error::Input(format!(
                "frame has {} values, buffer has {} channels",
                values.len(),
                self.channels.len()
            )));
        }
        for (ch, &v) in self.channels.iter_mut().zip(values) {
            if ch.len() == self.capacity {
                ch.pop_front();
            }
            ch.push_back(v);
        }
        self.pushed += 1;
        Ok(self.state())
    }

    pub fn channel(&self, i: usize) -> Vec<f64> {
        self.channels[i].iter().copied().collect()
    }

    /// All channels, oldest sample first.
    pub fn snapshot(&self) -> Vec<Vec<f64>> {
        self.channels
            .iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }

    /// Per-sample mean across channels.
    pub fn channel_mean(&self) -> Vec<f64> {
        let n = self.channels.len() as f64;
        (0..self.filled())
            .map(|t| self.channels.iter().map(|c| c[t]).sum::<f64>() / n)
            .collect()
    }
}
