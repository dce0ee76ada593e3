//! Multi-valued cells: values joined by a one-character separator, with `\`
//! escaping the separator and itself.

pub fn join_values<S: AsRef<str>>(values: &[S], separator: char) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(separator);
        }
        for c in v.as_ref().chars() {
            if c == separator || c == '\\' {
                out.push('\\');
            }
            out.push(c);
        }
    }
    out
}

/// Inverse of [`join_values`]. An empty cell holds no values.
pub fn split_values(cell: &str, separator: char) -> Vec<String> {
    if cell.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = String::new();
    let mut chars = cell.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            // a trailing lone backslash is kept literally
            current.push(chars.next().unwrap_or('\\'));
        } else if c == separator {
            out.push(std::mem::take(&mut current));
        } else {
            current.push(c);
        }
    }
    out.push(current);
    out
}
