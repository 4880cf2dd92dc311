use std::io::{self, Write};

use crate::model::ProfileTable;

pub const DEFAULT_PRECISION: usize = 12;
pub const MAX_PRECISION: usize = 17;

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `%g`-style rendering with `precision` significant digits.
pub fn format_sig(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let p = precision.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

/// Header row plus one LF-terminated line per grid point.
pub fn write_table<W: Write>(
    out: &mut W,
    table: &ProfileTable,
    precision: usize,
) -> io::Result<()> {
    let mut header = vec![table.grid_name()];
    header.extend(table.columns().iter().map(|(name, _)| name.as_str()));
    writeln!(out, "{}", header.join(","))?;
    for (i, &x) in table.grid().iter().enumerate() {
        let mut line = format_sig(x, precision);
        for (_, values) in table.columns() {
            line.push(',');
            line.push_str(&format_sig(values[i], precision));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn table_to_string(table: &ProfileTable, precision: usize) -> String {
    let mut buf = Vec::new();
    write_table(&mut buf, table, precision).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_style() {
        assert_eq!(format_sig(0.35355339059327373, 7), "0.3535534");
        assert_eq!(format_sig(0.35355339059327373, 12), "0.353553390593");
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(10.0, 12), "10");
        assert_eq!(format_sig(0.01, 12), "0.01");
        assert_eq!(format_sig(-3.75, 12), "-3.75");
        assert_eq!(format_sig(1.5e-7, 12), "1.5e-07");
        assert_eq!(format_sig(2.5e13, 12), "2.5e+13");
        assert_eq!(format_sig(123456.0, 3), "1.23e+05");
        assert_eq!(format_sig(0.0001, 3), "0.0001");
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(6.876606651407495, 6), "6.87661");
    }

    #[test]
    fn rounding_carries_into_exponent() {
        assert_eq!(format_sig(9.9999999, 3), "10");
        assert_eq!(format_sig(999999.7, 6), "1e+06");
    }

    #[test]
    fn table_layout() {
        let mut t = ProfileTable::new("rho", vec![0.0, 0.5]);
        t.push_column("a", vec![1.0, 0.25]).unwrap();
        assert_eq!(table_to_string(&t, 12), "rho,a\n0,1\n0.5,0.25\n");
    }
}
