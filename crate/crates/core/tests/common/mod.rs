//! Published table values shared by the integration tests.

#![allow(dead_code)]

#[derive(Debug, Clone)]
pub struct GoldenRow {
    pub k: u32,
    pub d: u32,
    pub a: u32,
    pub b: u32,
    pub n0: String,
    pub n1: String,
    pub combo: String,
    pub w: String,
}

/// Rows of the `M_5^k` tables, `k = 1..4`, `d <= 5`.
pub fn golden_m5() -> Vec<GoldenRow> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/m5_tables.tsv");
    let text = std::fs::read_to_string(path).expect("golden table file");
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let c: Vec<&str> = l.split('\t').collect();
            GoldenRow {
                k: c[0].parse().unwrap(),
                d: c[1].parse().unwrap(),
                a: c[2].parse().unwrap(),
                b: c[3].parse().unwrap(),
                n0: c[4].into(),
                n1: c[5].into(),
                combo: c[6].into(),
                w: c[7].into(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct PlaneRow {
    pub d: u32,
    pub a: u32,
    pub n1: &'static str,
    pub normalized: &'static str,
    pub w: &'static str,
}

/// `M_4^k` tables, `d <= 5`, with `a = m_2 = 3d/k`.
pub fn plane_tables(k: u32) -> Vec<PlaneRow> {
    let rows: &[(u32, u32, &str, &str, &str)] = match k {
        1 => &[
            (1, 3, "0", "0", "-3/8"),
            (2, 6, "0", "0", "-63"),
            (3, 9, "1", "1", "-77789"),
            (4, 12, "225", "225", "-320162385"),
            (5, 15, "87192", "87192", "-3123359504298"),
        ],
        2 => &[
            (1, 2, "0", "0", "-1"),
            (2, 4, "0", "0", "-262/3"),
            (3, 6, "0", "0", "-98632/3"),
            (4, 8, "256", "1", "-29153744"),
            (5, 10, "40960", "40", "-47360066944"),
        ],
        3 => &[
            (1, 1, "0", "0", "-21/8"),
            (2, 2, "0", "0", "-1611/8"),
            (3, 3, "27", "1", "-156465/4"),
            (4, 4, "2187", "27", "-50682753/4"),
            (5, 5, "183708", "756", "-5815337247"),
        ],
        _ => &[],
    };
    rows.iter().map(|&(d, a, n1, normalized, w)| PlaneRow { d, a, n1, normalized, w }).collect()
}
