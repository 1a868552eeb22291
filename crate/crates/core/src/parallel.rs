//! Process-wide worker count and an order-preserving parallel map.

use std::sync::atomic::{AtomicUsize, Ordering};

static THREADS: AtomicUsize = AtomicUsize::new(1);

/// Worker threads used by the data-parallel loops (at least one).
pub fn threads() -> usize {
    THREADS.load(Ordering::Relaxed).max(1)
}

pub fn set_threads(n: usize) {
    THREADS.store(n.max(1), Ordering::Relaxed);
}

/// `items.map(f)` split into contiguous chunks over [`threads`] scoped threads.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = threads().min(items.len());
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    #[test]
    fn map_preserves_order() {
        let xs: Vec<usize> = (0..37).collect();
        super::set_threads(4);
        let ys = super::map(&xs, |x| x * x);
        super::set_threads(1);
        assert_eq!(ys, xs.iter().map(|x| x * x).collect::<Vec<_>>());
    }
}
