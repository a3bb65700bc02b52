use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One row of an experiment table. `None` fields are written as empty CSV cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: String,
    pub epsilon: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub l2_error: Option<f64>,
    pub eoc: Option<f64>,
    pub n_iter_total: usize,
    pub mean_cond1: Option<f64>,
    pub eo_eps: Option<f64>,
    pub converged: bool,
}

pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(l2: Option<f64>) -> RunRecord {
        RunRecord {
            method: "ImplTaylor-1/ej/direct/dimdrk".into(),
            epsilon: 1e-3,
            dt: 0.125,
            n_steps: 8,
            l2_error: l2,
            eoc: None,
            n_iter_total: 17,
            mean_cond1: Some(4.5),
            eo_eps: None,
            converged: true,
        }
    }

    #[test]
    fn header_and_empty_fields() {
        let mut buf = Vec::new();
        write_csv(&[row(None)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "method,epsilon,dt,n_steps,l2_error,eoc,n_iter_total,mean_cond1,eo_eps,converged"
        );
        assert_eq!(lines.next().unwrap(), "ImplTaylor-1/ej/direct/dimdrk,0.001,0.125,8,,,17,4.5,,true");
    }

    #[test]
    fn round_trip() {
        let rows = vec![row(Some(1.25e-9)), row(None)];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
    }
}
