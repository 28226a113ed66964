use std::fmt;
use std::marker::PhantomData;
use std::ops::Deref;

pub const CACHE_LINE: usize = 64;

#[derive(Clone, Copy)]
#[repr(C, align(64))]
struct Line([u8; CACHE_LINE]);

/// Plain-old-data record that can live in a [`CachePool`].
///
/// # Safety
///
/// Implementors must be `repr(C)` without interior pointers, have a size
/// that divides the cache line, and an alignment of at most 64 bytes.
pub unsafe trait PoolRecord: Copy + 'static {}

/// Contiguous, immutable array of records whose first element starts on a
/// cache-line boundary. Records never straddle two lines because every
/// record size divides the line size.
#[derive(Clone)]
pub struct CachePool<T: PoolRecord> {
    lines: Vec<Line>,
    len: usize,
    _marker: PhantomData<T>,
}

impl<T: PoolRecord> CachePool<T> {
    const PER_LINE: usize = {
        assert!(CACHE_LINE.is_multiple_of(std::mem::size_of::<T>()));
        assert!(std::mem::align_of::<T>() <= CACHE_LINE);
        CACHE_LINE / std::mem::size_of::<T>()
    };

    pub fn from_slice(items: &[T]) -> Self {
        let n_lines = items.len().div_ceil(Self::PER_LINE).max(1);
        let mut lines = vec![Line([0; CACHE_LINE]); n_lines];
        let base = lines.as_mut_ptr() as *mut T;
        for (i, item) in items.iter().enumerate() {
            // SAFETY: `lines` holds `n_lines * PER_LINE >= items.len()` slots,
            // each suitably aligned because the buffer is 64-byte aligned and
            // the record size is a multiple of its alignment.
            unsafe { base.add(i).write(*item) };
        }
        CachePool {
            lines,
            len: items.len(),
            _marker: PhantomData,
        }
    }

    pub fn as_slice(&self) -> &[T] {
        // SAFETY: the first `len` slots were initialized in `from_slice`, and
        // the buffer is never mutated afterwards.
        unsafe { std::slice::from_raw_parts(self.lines.as_ptr() as *const T, self.len) }
    }

    /// Address of the first record; always a multiple of [`CACHE_LINE`].
    pub fn base_address(&self) -> usize {
        self.lines.as_ptr() as usize
    }

    /// Bytes occupied by the pool, rounded up to whole cache lines.
    pub fn footprint_bytes(&self) -> usize {
        self.len.div_ceil(Self::PER_LINE) * CACHE_LINE
    }
}

impl<T: PoolRecord> Deref for CachePool<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        self.as_slice()
    }
}

impl<T: PoolRecord> FromIterator<T> for CachePool<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let items: Vec<T> = iter.into_iter().collect();
        CachePool::from_slice(&items)
    }
}

impl<T: PoolRecord + PartialEq> PartialEq for CachePool<T> {
    fn eq(&self, other: &Self) -> bool {
        self.as_slice() == other.as_slice()
    }
}

impl<T: PoolRecord + fmt::Debug> fmt::Debug for CachePool<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone, Copy, Debug, PartialEq)]
    #[repr(C)]
    struct Pair(u32, u32);
    unsafe impl PoolRecord for Pair {}

    #[test]
    fn pool_roundtrips_and_is_aligned() {
        let items: Vec<Pair> = (0..37).map(|i| Pair(i, 2 * i)).collect();
        let pool = CachePool::from_slice(&items);
        assert_eq!(&pool[..], &items[..]);
        assert_eq!(pool.base_address() % CACHE_LINE, 0);
        assert_eq!(pool.footprint_bytes(), 5 * 64);
        assert_eq!(pool.clone(), pool);
    }

    #[test]
    fn empty_pool() {
        let pool: CachePool<Pair> = CachePool::from_slice(&[]);
        assert!(pool.is_empty());
        assert_eq!(pool.base_address() % CACHE_LINE, 0);
    }
}
