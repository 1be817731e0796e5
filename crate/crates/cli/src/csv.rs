//! Trajectory CSV files.
//!
//! Columns are `t,q1..qn,p1..pn,z,lambda,K,H`. Floats are written as
//! `{:.16e}`, which carries 17 significant digits and so reads back to the
//! identical `f64`.

use std::io::{self, BufRead, Write};

use contact_core::{ContactState, Trajectory};

pub fn header(n: usize) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|i| format!("q{i}")));
    cols.extend((1..=n).map(|i| format!("p{i}")));
    cols.extend(["z", "lambda", "K", "H"].map(String::from));
    cols.join(",")
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn row(s: &ContactState, k: f64, h: f64) -> String {
    let mut fields = Vec::with_capacity(2 * s.q.len() + 5);
    fields.push(s.t);
    fields.extend(&s.q);
    fields.extend(&s.p);
    fields.extend([s.z, s.lambda, k, h]);
    fields.into_iter().map(fmt_f64).collect::<Vec<_>>().join(",")
}

pub fn write_trajectory<W: Write>(mut w: W, n: usize, traj: &Trajectory) -> io::Result<()> {
    writeln!(w, "{}", header(n))?;
    for ((s, k), h) in traj.states.iter().zip(&traj.k).zip(&traj.h) {
        writeln!(w, "{}", row(s, *k, *h))?;
    }
    w.flush()
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub state: ContactState,
    pub k: f64,
    pub h: f64,
}

/// Reads a trajectory CSV back. The degree of freedom count comes from the header.
pub fn read_trajectory<R: BufRead>(r: R) -> io::Result<Vec<Record>> {
    let invalid = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut lines = r.lines();
    let head = lines.next().ok_or_else(|| invalid("empty file".into()))??;
    let cols = head.split(',').count();
    if cols < 7 || (cols - 5) % 2 != 0 {
        return Err(invalid(format!("unexpected header `{head}`")));
    }
    let n = (cols - 5) / 2;
    if head != header(n) {
        return Err(invalid(format!("unexpected header `{head}`")));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let v: Vec<f64> = line
            .split(',')
            .map(|f| f.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| invalid(format!("row {}: {e}", i + 1)))?;
        if v.len() != cols {
            return Err(invalid(format!("row {}: expected {cols} fields, got {}", i + 1, v.len())));
        }
        out.push(Record {
            state: ContactState::new(
                v[1..=n].to_vec(),
                v[n + 1..=2 * n].to_vec(),
                v[2 * n + 1],
                v[2 * n + 2],
                v[0],
            ),
            k: v[2 * n + 3],
            h: v[2 * n + 4],
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        assert_eq!(header(1), "t,q1,p1,z,lambda,K,H");
        assert_eq!(header(2), "t,q1,q2,p1,p2,z,lambda,K,H");
    }

    #[test]
    fn rejects_bad_rows() {
        let text = "t,q1,p1,z,lambda,K,H\n1,2,3\n";
        assert!(read_trajectory(text.as_bytes()).is_err());
        let text = "t,x,p1,z,lambda,K,H\n";
        assert!(read_trajectory(text.as_bytes()).is_err());
    }
}
