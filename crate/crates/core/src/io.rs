//! CSV import and export.
//!
//! Numbers are written with `Display`, which for `f64` is the shortest
//! representation that parses back to the same value.

use std::io::{Read, Write};

use crate::bench::LoadHistory;
use crate::eicm::InteractionMatrix;
use crate::error::{Error, Result};
use crate::model::{AssemblyPlan, LoadVector};
use crate::pattern::TighteningPattern;
use crate::scalar::Scalar;
use crate::tam::TamCoefficients;

pub const LOADS_HEADER: [&str; 5] = ["bolt_id", "position", "order", "initial_kn", "final_kn"];
pub const COEFFICIENTS_HEADER: [&str; 4] = ["alpha", "beta", "gamma", "delta"];

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source)
}

fn parse<T: Scalar>(field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::Csv(format!("invalid {what} {field:?}")))
}

fn parse_usize(field: &str, what: &str) -> Result<usize> {
    field
        .parse()
        .map_err(|_| Error::Csv(format!("invalid {what} {field:?}")))
}

/// Header row of bolt ids in tightening order, behind a leading label column.
fn order_from_header(headers: &csv::StringRecord) -> Result<TighteningPattern> {
    let order = headers
        .iter()
        .skip(1)
        .map(|h| parse_usize(h, "bolt id"))
        .collect::<Result<Vec<_>>>()?;
    TighteningPattern::new(order)
}

fn write_square<W: Write, T: Scalar>(
    sink: W,
    corner: &str,
    pattern: &TighteningPattern,
    rows: impl Iterator<Item = (String, Vec<T>)>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec![corner.to_string()];
    header.extend(pattern.order().iter().map(ToString::to_string));
    w.write_record(&header)?;
    for (label, row) in rows {
        let mut record = vec![label];
        record.extend(row.iter().map(ToString::to_string));
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}

type LabeledRows<T> = Vec<(String, Vec<T>)>;

fn read_square<R: Read, T: Scalar>(
    source: R,
    corner: &str,
) -> Result<(TighteningPattern, LabeledRows<T>)> {
    let mut r = reader(source);
    let headers = r.headers()?.clone();
    if headers.get(0) != Some(corner) {
        return Err(Error::Csv(format!(
            "expected first header column {corner:?}, found {:?}",
            headers.get(0).unwrap_or("")
        )));
    }
    let pattern = order_from_header(&headers)?;
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let label = record.get(0).unwrap_or("").to_string();
        let values = record
            .iter()
            .skip(1)
            .map(|f| parse(f, "load"))
            .collect::<Result<Vec<T>>>()?;
        rows.push((label, values));
    }
    Ok((pattern, rows))
}

/// `step,<bolt ids in tightening order>` followed by one row per step.
pub fn write_history_csv<W: Write, T: Scalar>(sink: W, sh: &LoadHistory<T>) -> Result<()> {
    write_square(
        sink,
        "step",
        sh.pattern(),
        sh.rows()
            .enumerate()
            .map(|(k, row)| ((k + 1).to_string(), row.to_vec())),
    )
}

pub fn read_history_csv<R: Read, T: Scalar>(source: R) -> Result<LoadHistory<T>> {
    let (pattern, rows) = read_square(source, "step")?;
    for (k, (label, _)) in rows.iter().enumerate() {
        if parse_usize(label, "step")? != k + 1 {
            return Err(Error::Csv(format!("step {label} out of sequence")));
        }
    }
    LoadHistory::from_rows(pattern, rows.into_iter().map(|(_, r)| r).collect())
}

/// `bolt,<bolt ids>` header, then one row per bolt, all in tightening order.
pub fn write_matrix_csv<W: Write, T: Scalar>(sink: W, a: &InteractionMatrix<T>) -> Result<()> {
    write_square(
        sink,
        "bolt",
        a.pattern(),
        a.pattern()
            .order()
            .iter()
            .zip(a.rows())
            .map(|(p, row)| (p.to_string(), row.to_vec())),
    )
}

pub fn read_matrix_csv<R: Read, T: Scalar>(source: R) -> Result<InteractionMatrix<T>> {
    let (pattern, rows) = read_square(source, "bolt")?;
    for ((label, _), &p) in rows.iter().zip(pattern.order()) {
        if parse_usize(label, "bolt id")? != p {
            return Err(Error::Csv(format!(
                "row bolt {label} does not match column order (expected {p})"
            )));
        }
    }
    InteractionMatrix::from_rows(pattern, rows.into_iter().map(|(_, r)| r).collect())
}

pub fn write_coefficients_csv<W: Write, T: Scalar>(
    sink: W,
    coeffs: &TamCoefficients<T>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(COEFFICIENTS_HEADER)?;
    w.write_record(coeffs.to_array().iter().map(ToString::to_string))?;
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}

/// Reads the first data row of an `alpha,beta,gamma,delta` file.
pub fn read_coefficients_csv<R: Read, T: Scalar>(source: R) -> Result<TamCoefficients<T>> {
    let mut r = reader(source);
    let headers = r.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Csv(format!("missing column {name:?}")))
    };
    let idx = COEFFICIENTS_HEADER
        .iter()
        .map(|h| column(h))
        .collect::<Result<Vec<_>>>()?;
    let record = r
        .records()
        .next()
        .ok_or_else(|| Error::Csv("no coefficient row".into()))??;
    let get = |k: usize| parse(record.get(idx[k]).unwrap_or(""), COEFFICIENTS_HEADER[k]);
    Ok(TamCoefficients::new(get(0)?, get(1)?, get(2)?, get(3)?))
}

/// Per-bolt plan rows, ascending by position.
pub fn write_plan_csv<W: Write, T: Scalar>(sink: W, plan: &AssemblyPlan<T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(LOADS_HEADER)?;
    for p in 1..=plan.pattern.n_bolts() {
        w.write_record([
            p.to_string(),
            p.to_string(),
            plan.pattern.order_index(p)?.to_string(),
            plan.initial_loads.get(p)?.to_string(),
            plan.predicted_final_loads.get(p)?.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}

/// Contents of a loads file: the tightening order, the initial loads and,
/// when the column is filled, the final loads.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadsFile<T> {
    pub pattern: TighteningPattern,
    pub initial: LoadVector<T>,
    pub finals: Option<LoadVector<T>>,
}

pub fn read_plan_csv<R: Read, T: Scalar>(source: R) -> Result<LoadsFile<T>> {
    let mut r = reader(source);
    let headers = r.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let need =
        |name: &str| column(name).ok_or_else(|| Error::Csv(format!("missing column {name:?}")));
    let (pos_col, order_col, init_col) = (need("position")?, need("order")?, need("initial_kn")?);
    let final_col = column("final_kn");

    let mut entries = Vec::new();
    for record in r.records() {
        let record = record?;
        let field = |c: usize| record.get(c).unwrap_or("");
        let position = parse_usize(field(pos_col), "position")?;
        let step = parse_usize(field(order_col), "order")?;
        let initial: T = parse(field(init_col), "initial_kn")?;
        let fin = match final_col.map(field) {
            Some(f) if !f.is_empty() => Some(parse::<T>(f, "final_kn")?),
            _ => None,
        };
        entries.push((position, step, initial, fin));
    }
    let n = entries.len();
    let mut order = vec![0; n];
    for &(position, step, _, _) in &entries {
        if step == 0 || step > n || order[step - 1] != 0 {
            return Err(Error::Csv(format!("invalid or repeated order {step}")));
        }
        order[step - 1] = position;
    }
    let pattern = TighteningPattern::new(order)?;
    let mut initial = LoadVector::empty(n);
    let mut finals = LoadVector::empty(n);
    let mut has_finals = true;
    for (position, _, init, fin) in entries {
        initial.set(position, init)?;
        match fin {
            Some(f) => finals.set(position, f)?,
            None => has_finals = false,
        }
    }
    Ok(LoadsFile {
        pattern,
        initial,
        finals: has_finals.then_some(finals),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    #[test]
    fn history_header_lists_tightening_order() {
        let pattern = TighteningPattern::new(vec![1, 3, 2]).unwrap();
        let sh = LoadHistory::from_rows(
            pattern,
            vec![
                vec![10000.0, 0.0, 0.0],
                vec![8250.0, 10000.0, 0.0],
                vec![7500.0, 9000.0, 10000.0],
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_history_csv(&mut buf, &sh).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "step,1,3,2\n1,10000,0,0\n2,8250,10000,0\n3,7500,9000,10000\n"
        );
        assert_eq!(read_history_csv::<_, f64>(text.as_bytes()).unwrap(), sh);
    }

    #[test]
    fn matrix_rejects_mismatched_row_labels() {
        let text = "bolt,1,2\n2,1,0.5\n1,0,1\n";
        assert!(read_matrix_csv::<_, f64>(text.as_bytes()).is_err());
    }

    #[test]
    fn exact_matrix_round_trip() {
        let text = "bolt,1,3,2\n1,1,-7/40,-3/40\n3,0,1,-1/10\n2,0,0,1\n";
        let a = read_matrix_csv::<_, Exact>(text.as_bytes()).unwrap();
        assert_eq!(a.get(1, 2), Exact::new(-7, 40));
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &a).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
    }

    #[test]
    fn coefficient_row() {
        let c = TamCoefficients::new(-0.139, -0.138, -0.019, -0.002);
        let mut buf = Vec::new();
        write_coefficients_csv(&mut buf, &c).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "alpha,beta,gamma,delta\n-0.139,-0.138,-0.019,-0.002\n"
        );
        assert_eq!(read_coefficients_csv::<_, f64>(buf.as_slice()).unwrap(), c);
        assert!(read_coefficients_csv::<_, f64>("alpha,beta\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn loads_file_without_finals() {
        let text = "position,order,initial_kn\n1,2,210.5\n2,1,200\n";
        let f = read_plan_csv::<_, f64>(text.as_bytes()).unwrap();
        assert_eq!(f.pattern.order(), [2, 1]);
        assert_eq!(f.initial.as_slice(), &[210.5, 200.0]);
        assert!(f.finals.is_none());
        let dup = "position,order,initial_kn\n1,1,210.5\n2,1,200\n";
        assert!(read_plan_csv::<_, f64>(dup.as_bytes()).is_err());
    }
}
