//! Data-parallel fan-out over independent lanes.
//!
//! Composite structures are vectors of single-writer lanes with no shared
//! state; batch ingestion fans the same item slice out to every lane. With
//! the `parallel` feature (default) the fan-out runs on rayon; without it,
//! the same loops run sequentially. Results are bit-identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn for_each_lane<T, F>(lanes: &mut [T], f: F)
where
    T: Send,
    F: Fn(&mut T) + Sync,
{
    lanes.par_iter_mut().for_each(f);
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_lane<T, F>(lanes: &mut [T], f: F)
where
    F: Fn(&mut T),
{
    lanes.iter_mut().for_each(f);
}

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}
