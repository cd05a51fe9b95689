use std::fmt::Write;

use crate::SdpProblem;

impl SdpProblem {
    /// Writes the problem in SDPA sparse format.
    ///
    /// SDPA's primal is `min Σ c_i x_i s.t. Σ x_i F_i − F_0 ⪰ 0`, which is the
    /// dual of this crate's form with `c = b`, `F_0 = C` and `F_i = A_i`.
    pub fn to_sdpa_sparse(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "\"bellforge\"");
        let _ = writeln!(s, "{}", self.constraints.len());
        let _ = writeln!(s, "{}", self.block_sizes.len());
        let sizes: Vec<String> = self.block_sizes.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(s, "{}", sizes.join(" "));
        let rhs: Vec<String> = self.rhs.iter().map(|b| format!("{b:.17e}")).collect();
        let _ = writeln!(s, "{}", rhs.join(" "));
        let mats = std::iter::once(&self.objective).chain(&self.constraints);
        for (k, mat) in mats.enumerate() {
            for e in mat.entries() {
                let _ = writeln!(
                    s,
                    "{} {} {} {} {:.17e}",
                    k,
                    e.block + 1,
                    e.row + 1,
                    e.col + 1,
                    e.value
                );
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use crate::{SdpProblem, SparseSym};

    #[test]
    fn sdpa_layout() {
        let mut p = SdpProblem::new(vec![2]);
        p.objective.push(0, 0, 1, 1.0);
        let mut a = SparseSym::new();
        a.push(0, 0, 0, 1.0);
        a.push(0, 1, 1, 1.0);
        p.add_constraint(a, 1.0);
        let text = p.to_sdpa_sparse();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "1");
        assert_eq!(lines[2], "1");
        assert_eq!(lines[3], "2");
        assert!(lines[5].starts_with("0 1 1 2 "));
        assert_eq!(lines.len(), 8);
    }
}
