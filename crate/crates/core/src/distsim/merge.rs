/// Folds messages per destination vertex.
///
/// Messages to one destination are combined in input order; the output
/// holds one entry per distinct destination in ascending id order.
pub fn merge_messages<T: Copy>(raw: &[(u64, T)], mut combine: impl FnMut(T, T) -> T) -> Vec<(u64, T)> {
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by_key(|&k| raw[k].0);
    let mut out: Vec<(u64, T)> = Vec::new();
    for k in order {
        let (dst, msg) = raw[k];
        match out.last_mut() {
            Some(last) if last.0 == dst => last.1 = combine(last.1, msg),
            _ => out.push((dst, msg)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_by_destination() {
        let raw = [(5, 1.0), (2, 2.0), (5, 3.0), (9, 4.0), (2, 5.0), (5, 6.0), (9, 7.0)];
        assert_eq!(merge_messages(&raw, |a, b| a + b), vec![(2, 7.0), (5, 10.0), (9, 11.0)]);
        assert_eq!(merge_messages(&[(3, 1.5)], |a, b| a + b), vec![(3, 1.5)]);
        assert!(merge_messages::<f64>(&[], |a, b| a + b).is_empty());
    }

    #[test]
    fn folds_in_input_order() {
        let raw = [(1, "a"), (0, "x"), (1, "b"), (1, "c")];
        let mut seen = Vec::new();
        let out = merge_messages(&raw, |a, b| {
            seen.push((a, b));
            b
        });
        assert_eq!(out, vec![(0, "x"), (1, "c")]);
        assert_eq!(seen, vec![("a", "b"), ("b", "c")]);
    }
}
