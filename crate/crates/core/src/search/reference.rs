//! Published reference values used as goldens by the drivers and the CLI.

/// u_k for k = 4..=16.
pub const TABLE1: [(usize, usize); 13] =
    [(4, 1), (5, 2), (6, 3), (7, 3), (8, 3), (9, 4), (10, 4), (11, 4), (12, 4), (13, 4), (14, 5), (15, 5), (16, 5)];

/// u_k for k = 74..=94.
pub const TABLE2: [(usize, usize); 21] = [
    (74, 45),
    (75, 43),
    (76, 41),
    (77, 39),
    (78, 37),
    (79, 35),
    (80, 33),
    (81, 30),
    (82, 29),
    (83, 26),
    (84, 25),
    (85, 23),
    (86, 21),
    (87, 19),
    (88, 17),
    (89, 15),
    (90, 13),
    (91, 11),
    (92, 8),
    (93, 6),
    (94, 2),
];

/// Surviving `(k, j1_min, j1_max)` after the first stage.
pub const TABLE3: [(usize, usize, usize); 4] = [(74, 14, 28), (75, 16, 26), (76, 18, 25), (77, 20, 23)];

/// Surviving `(k, j1_min, j1_max)` after the second stage.
pub const TABLE4: [(usize, usize, usize); 3] = [(74, 14, 23), (75, 16, 21), (76, 18, 19)];

/// Rank caps `(α, [k=74, k=75, k=76])`.
pub const TABLE5: [(u32, [usize; 3]); 3] = [(4, [11, 11, 10]), (5, [7, 6, 6]), (6, [4, 4, 4])];

/// k values covered by the rank caps.
pub const TABLE5_K: [usize; 3] = [74, 75, 76];

/// Upper bounds w(j), j = 1..=39.
pub const TABLE6: [f64; 39] = [
    0.2137, 0.2128, 0.2119, 0.2109, 0.2100, 0.2091, 0.2081, 0.2072, 0.2062, 0.2053, 0.2043, 0.2034, 0.2024, 0.2014,
    0.2004, 0.1995, 0.1985, 0.1975, 0.1965, 0.1955, 0.1945, 0.1935, 0.1925, 0.1914, 0.1904, 0.1894, 0.1884, 0.1873,
    0.1863, 0.1852, 0.1841, 0.1831, 0.1820, 0.1809, 0.1799, 0.1788, 0.1777, 0.1766, 0.1755,
];

/// Lower bounds ϖ′(j), j = 1..=39.
pub const TABLE7: [f64; 39] = [
    0.1814, 0.1812, 0.1810, 0.1808, 0.1804, 0.1802, 0.1800, 0.1798, 0.1797, 0.1797, 0.1798, 0.1800, 0.1800, 0.1800,
    0.1798, 0.1797, 0.1797, 0.1798, 0.1800, 0.1800, 0.1800, 0.1798, 0.1796, 0.1792, 0.1788, 0.1784, 0.1781, 0.1779,
    0.1777, 0.1775, 0.1773, 0.1771, 0.1769, 0.1765, 0.1763, 0.1761, 0.1755, 0.1751, 0.1748,
];

/// δ′(j), j = 1..=39.
pub const TABLE8: [f64; 39] = [
    0.03422, 0.03353, 0.03283, 0.03203, 0.03142, 0.03083, 0.03005, 0.02936, 0.02848, 0.02753, 0.02638, 0.02536,
    0.02436, 0.02340, 0.02253, 0.02178, 0.02075, 0.01958, 0.01846, 0.01748, 0.01650, 0.01561, 0.01481, 0.01398,
    0.01340, 0.01279, 0.01216, 0.01133, 0.01053, 0.00964, 0.00874, 0.00795, 0.00705, 0.00618, 0.00547, 0.00458,
    0.00392, 0.00331, 0.00258,
];

/// m ranges `(j_min, j_max, m_min, m_max)`.
pub const TABLE9: [(u32, u32, usize, usize); 5] =
    [(1, 6, 11, 33), (7, 7, 12, 33), (8, 12, 12, 32), (13, 13, 13, 32), (14, 14, 13, 31)];

/// Reduced δ′(j), j = 1..=14.
pub const TABLE10: [f64; 14] =
    [0.02422, 0.02353, 0.02283, 0.02203, 0.02142, 0.02083, 0.02005, 0.01936, 0.01848, 0.01753, 0.01638, 0.01536, 0.01436, 0.01340];

/// Per-entry tolerance for Tables 6 to 10.
pub const TABLE_TOL: f64 = 5e-4;

/// Exponents of the 44-prime extremal candidate.
pub const N_STAR: [u32; 44] = [
    354, 223, 152, 125, 102, 95, 86, 83, 77, 72, 71, 67, 65, 64, 63, 61, 59, 59, 57, 57, 56, 55, 55, 54, 53, 52, 52,
    52, 51, 51, 50, 49, 49, 49, 48, 48, 48, 47, 47, 47, 46, 46, 46, 46,
];

pub const LARGEST_INEQ2_COUNTEREXAMPLE: &str = "782139803452561073520";

/// The m range for interval j, if listed.
pub fn table9_range(j: u32) -> Option<(usize, usize)> {
    TABLE9.iter().find(|r| r.0 <= j && j <= r.1).map(|r| (r.2, r.3))
}

/// Table 5 cap for exponent `alpha` and k, if listed.
pub fn table5_cap(alpha: u32, k: usize) -> Option<usize> {
    let col = TABLE5_K.iter().position(|&x| x == k)?;
    TABLE5.iter().find(|r| r.0 == alpha).map(|r| r.1[col])
}
