//! Update stream files: one update per line, `+ <u> <v>` to insert a
//! directed edge, `- <u> <v>` to delete one; `#` starts a comment line.

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateOp {
    Insert(u64, u64),
    Delete(u64, u64),
}

impl UpdateOp {
    pub fn endpoints(&self) -> (u64, u64) {
        match *self {
            UpdateOp::Insert(u, v) | UpdateOp::Delete(u, v) => (u, v),
        }
    }
}

pub fn parse_updates(text: &str, path: &str) -> Result<Vec<UpdateOp>, CliError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut fields = t.split_whitespace();
        let op = fields.next().expect("nonempty line");
        let u = fields
            .next()
            .ok_or_else(|| CliError::parse(path, line, "missing source id"))?;
        let v = fields
            .next()
            .ok_or_else(|| CliError::parse(path, line, "missing target id"))?;
        if fields.next().is_some() {
            return Err(CliError::parse(path, line, "trailing fields"));
        }
        let u: u64 = u
            .parse()
            .map_err(|_| CliError::parse(path, line, "source is not a decimal id"))?;
        let v: u64 = v
            .parse()
            .map_err(|_| CliError::parse(path, line, "target is not a decimal id"))?;
        match op {
            "+" => out.push(UpdateOp::Insert(u, v)),
            "-" => out.push(UpdateOp::Delete(u, v)),
            other => {
                return Err(CliError::parse(
                    path,
                    line,
                    format!("expected '+' or '-', found '{other}'"),
                ))
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ops_and_comments() {
        let text = "# header\n+ 1 2\n\n- 3 4\n+ 0 0\n";
        let ops = parse_updates(text, "u").unwrap();
        assert_eq!(
            ops,
            vec![
                UpdateOp::Insert(1, 2),
                UpdateOp::Delete(3, 4),
                UpdateOp::Insert(0, 0)
            ]
        );
    }

    #[test]
    fn errors_name_lines() {
        let err = parse_updates("+ 1 2\n* 3 4\n", "u").unwrap_err();
        assert!(err.to_string().starts_with("u:2:"), "{err}");
        let err = parse_updates("+ 1\n", "u").unwrap_err();
        assert!(err.to_string().starts_with("u:1:"), "{err}");
        let err = parse_updates("+ 1 x\n", "u").unwrap_err();
        assert!(err.to_string().contains("decimal"), "{err}");
    }
}
