//! Hilbert space-filling curve index for ordering points of the plane.

/// Maps grid coordinates in [0, 2^order)^2 to the distance along the Hilbert
/// curve of the given order.
pub fn hilbert_index(order: u32, mut x: u64, mut y: u64) -> u64 {
    let side = 1u64 << order;
    debug_assert!(x < side && y < side);
    let mut rx;
    let mut ry;
    let mut d: u64 = 0;
    let mut s = side / 2;
    while s > 0 {
        rx = u64::from((x & s) > 0);
        ry = u64::from((y & s) > 0);
        d += s * s * ((3 * rx) ^ ry);
        // Rotate the quadrant.
        if ry == 0 {
            if rx == 1 {
                x = s.wrapping_sub(1).wrapping_sub(x) & (side - 1);
                y = s.wrapping_sub(1).wrapping_sub(y) & (side - 1);
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}
