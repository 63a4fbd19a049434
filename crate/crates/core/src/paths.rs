//! Odometer enumeration of the path space `{0..N}^M`.
//!
//! The space is cut into chunks by fixing the leading digits. The chunk
//! layout depends only on `(N, M)`, and chunk results are merged in chunk
//! order, so the outcome is identical for every execution mode and pool size.

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Default limit on the number of enumerated paths.
pub const DEFAULT_ENUMERATION_CAP: u64 = 20_000_000;

/// Minimum number of chunks the space is split into, when it is large enough.
const TARGET_CHUNKS: u128 = 256;

/// Settings shared by all exhaustive enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationConfig {
    pub cap: u64,
    pub execution: Execution,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ENUMERATION_CAP,
            execution: Execution::default(),
        }
    }
}

impl EnumerationConfig {
    pub fn with_execution(execution: Execution) -> Self {
        Self {
            execution,
            ..Self::default()
        }
    }

    /// Errors if `items` exceeds the cap.
    pub fn check(&self, items: Option<u128>) -> Result<u128> {
        match items {
            Some(k) if k <= self.cap as u128 => Ok(k),
            Some(k) => Err(Error::CapExceeded {
                required: k,
                cap: self.cap,
            }),
            None => Err(Error::CapExceeded {
                required: u128::MAX,
                cap: self.cap,
            }),
        }
    }
}

/// `N^M`, or `None` on overflow.
pub fn path_count(n: usize, m: usize) -> Option<u128> {
    (n as u128).checked_pow(u32::try_from(m).ok()?)
}

/// Folds `visit` over every path of length `m` in odometer order (last index
/// fastest). Each chunk starts from `init()`; chunk accumulators are merged
/// left to right.
pub(crate) fn fold_paths<A, Init, Visit, Merge>(
    n: usize,
    m: usize,
    execution: Execution,
    init: Init,
    visit: Visit,
    merge: Merge,
) -> A
where
    A: Send,
    Init: Fn() -> A + Sync + Send,
    Visit: Fn(&mut A, &[usize]) + Sync + Send,
    Merge: Fn(&mut A, A),
{
    let mut prefix_len = 0;
    while prefix_len < m && (n as u128).pow(prefix_len as u32) < TARGET_CHUNKS {
        prefix_len += 1;
    }
    let chunks = n.pow(prefix_len as u32);

    let partials = execution.map_indexed(chunks, |chunk| {
        let mut acc = init();
        let mut path = vec![0usize; m];
        // leading digits from the chunk number
        let mut rest = chunk;
        for slot in path[..prefix_len].iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        loop {
            visit(&mut acc, &path);
            // odometer step over the free suffix
            let mut pos = m;
            loop {
                if pos == prefix_len {
                    return acc;
                }
                pos -= 1;
                path[pos] += 1;
                if path[pos] < n {
                    break;
                }
                path[pos] = 0;
            }
        }
    });

    let mut iter = partials.into_iter();
    let mut total = iter.next().unwrap_or_else(&init);
    for part in iter {
        merge(&mut total, part);
    }
    total
}
