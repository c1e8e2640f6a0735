/// Visits every `order`-tuple of indices in `0..n` (odometer order, last
/// position fastest) and hands `visit` the products of the selected `xs` and
/// `ys` entries. Prefix products are cached, so advancing the last position
/// costs a single multiplication.
///
/// `order == 0` visits the empty tuple once with products `(1, 1)`.
pub(crate) fn for_each_product(xs: &[f64], ys: &[f64], order: usize, mut visit: impl FnMut(f64, f64)) {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if order == 0 {
        visit(1.0, 1.0);
        return;
    }
    if n == 0 {
        return;
    }

    let mut idx = vec![0usize; order];
    let mut xp = vec![1.0; order + 1];
    let mut yp = vec![1.0; order + 1];
    for k in 0..order {
        xp[k + 1] = xp[k] * xs[0];
        yp[k + 1] = yp[k] * ys[0];
    }

    loop {
        visit(xp[order], yp[order]);

        let mut k = order;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
        }
        for j in k..order {
            xp[j + 1] = xp[j] * xs[idx[j]];
            yp[j + 1] = yp[j] * ys[idx[j]];
        }
    }
}

/// Sign selection with `sign(0) = 0`.
#[inline]
pub(crate) fn sign0(r: f64) -> f64 {
    if r > 0.0 {
        1.0
    } else if r < 0.0 {
        -1.0
    } else {
        0.0
    }
}
