//! Reading a numeric series from CSV.

use std::io::Read;

use anyhow::{anyhow, bail, Context, Result};

/// Parses one numeric column. The first row is treated as a header when its
/// selected field is not a number; `column` selects a field by header name
/// and requires a header.
pub fn read_series(reader: impl Read, column: Option<&str>) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut records = rdr.records();
    let first = match records.next() {
        Some(r) => r.context("reading input")?,
        None => bail!("input is empty"),
    };

    let (index, header) = match column {
        Some(name) => {
            let idx = first.iter().position(|f| f == name).ok_or_else(|| {
                anyhow!(
                    "no column named {name:?} in header {:?}",
                    first.iter().collect::<Vec<_>>()
                )
            })?;
            (idx, true)
        }
        None => {
            if first.len() > 1 {
                bail!("input has {} columns; pick one with --column", first.len());
            }
            (0, first.get(0).is_some_and(|f| f.parse::<f64>().is_err()))
        }
    };

    let mut out = Vec::new();
    let mut push = |rec: &csv::StringRecord, line: u64| -> Result<()> {
        let field = rec
            .get(index)
            .ok_or_else(|| anyhow!("line {line}: missing column {}", index + 1))?;
        let v: f64 = field
            .parse()
            .map_err(|_| anyhow!("line {line}: {field:?} is not a number"))?;
        if !v.is_finite() {
            bail!("line {line}: non-finite value {field}");
        }
        out.push(v);
        Ok(())
    };
    if !header {
        push(&first, 1)?;
    }
    for rec in records {
        let rec = rec.context("reading input")?;
        let line = rec.position().map_or(0, |p| p.line());
        push(&rec, line)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_and_header() {
        assert_eq!(
            read_series("1\n2\n3.5\n".as_bytes(), None).unwrap(),
            vec![1.0, 2.0, 3.5]
        );
        assert_eq!(
            read_series("x\n1\n2\n".as_bytes(), None).unwrap(),
            vec![1.0, 2.0]
        );
        assert_eq!(
            read_series("a,b\n1,10\n2,20\n".as_bytes(), Some("b")).unwrap(),
            vec![10.0, 20.0]
        );
    }

    #[test]
    fn errors() {
        assert!(read_series("".as_bytes(), None).is_err());
        assert!(read_series("1\nfoo\n".as_bytes(), None).is_err());
        assert!(read_series("a,b\n1,2\n".as_bytes(), None).is_err());
        assert!(read_series("a,b\n1,2\n".as_bytes(), Some("c")).is_err());
        assert!(read_series("1\nNaN\n".as_bytes(), None).is_err());
    }
}
