//! Small shared helpers.

/// Map `f` over `items` on up to `jobs` worker threads, returning results in
/// input order. With `jobs <= 1` this is a plain sequential map, and the
/// output never depends on the worker count.
pub fn par_map_ordered<T, U, F>(items: Vec<T>, jobs: usize, f: F) -> Vec<U>
where
    T: Send + Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let jobs = jobs.min(items.len());
    let chunk = items.len().div_ceil(jobs);
    let mut out: Vec<Option<U>> = Vec::with_capacity(items.len());
    out.resize_with(items.len(), || None);
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(jobs);
        for (start, (chunk_items, slot)) in items
            .chunks(chunk)
            .zip(out.chunks_mut(chunk))
            .enumerate()
            .map(|(i, pair)| (i * chunk, pair))
        {
            let _ = start;
            let f = &f;
            handles.push(scope.spawn(move || {
                for (item, s) in chunk_items.iter().zip(slot.iter_mut()) {
                    *s = Some(f(item));
                }
            }));
        }
        for h in handles {
            h.join().expect("worker panicked");
        }
    });
    out.into_iter().map(|v| v.expect("slot filled")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_and_job_count_independent() {
        let items: Vec<u64> = (0..97).collect();
        let sq = |x: &u64| x * x;
        let seq = par_map_ordered(items.clone(), 1, sq);
        for jobs in [2, 3, 8, 200] {
            assert_eq!(par_map_ordered(items.clone(), jobs, sq), seq);
        }
    }
}
