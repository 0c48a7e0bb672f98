//! Cooperative cancellation for long-running computations.
//!
//! The crate has no clock; callers that need timeouts implement [`Cancel`]
//! on top of whatever time source they have.

use core::sync::atomic::{AtomicBool, Ordering};

pub trait Cancel {
    fn cancelled(&self) -> bool;
}

/// Never cancels.
#[derive(Debug, Clone, Copy, Default)]
pub struct Never;

impl Cancel for Never {
    #[inline]
    fn cancelled(&self) -> bool {
        false
    }
}

impl Cancel for AtomicBool {
    fn cancelled(&self) -> bool {
        self.load(Ordering::Relaxed)
    }
}

impl<C: Cancel + ?Sized> Cancel for &C {
    fn cancelled(&self) -> bool {
        (**self).cancelled()
    }
}
