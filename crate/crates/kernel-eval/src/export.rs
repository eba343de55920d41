//! Tabulation of kernel values on a grid of points.

use rug::Float;

use crate::context::KernelContext;
use crate::{KernelError, KernelKind};

/// One `(x, y, kernel, value)` row.
#[derive(Debug, Clone)]
pub struct KernelRow {
    pub x: Float,
    pub y: Float,
    pub kind: KernelKind,
    pub value: Float,
}

/// Two-digit label of a kernel, as used in the CSV `kernel_ab` column.
pub fn kind_label(kind: KernelKind) -> &'static str {
    match kind {
        KernelKind::K00 => "00",
        KernelKind::K01 => "01",
        KernelKind::K10 => "10",
        KernelKind::K11 => "11",
    }
}

pub fn parse_kind(label: &str) -> Option<KernelKind> {
    match label {
        "00" => Some(KernelKind::K00),
        "01" => Some(KernelKind::K01),
        "10" => Some(KernelKind::K10),
        "11" => Some(KernelKind::K11),
        _ => None,
    }
}

/// All kernels in `kinds` on the product grid `xs × ys`, row order `x`, `y`, kind.
pub fn tabulate(ctx: &KernelContext, kinds: &[KernelKind], xs: &[Float], ys: &[Float]) -> Result<Vec<KernelRow>, KernelError> {
    let nx = xs.iter().map(|x| ctx.node_values(x)).collect::<Result<Vec<_>, _>>()?;
    let ny = ys.iter().map(|y| ctx.node_values(y)).collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::with_capacity(xs.len() * ys.len() * kinds.len());
    for a in &nx {
        for b in &ny {
            for &kind in kinds {
                rows.push(KernelRow { x: a.x.clone(), y: b.x.clone(), kind, value: ctx.kernel_at(kind, a, b) });
            }
        }
    }
    Ok(rows)
}

/// CSV text with header `x,y,kernel_ab,value`, values printed to `digits` significant digits.
pub fn to_csv(rows: &[KernelRow], digits: usize) -> String {
    let mut out = String::from("x,y,kernel_ab,value\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.x.to_string_radix(10, Some(digits)),
            r.y.to_string_radix(10, Some(digits)),
            kind_label(r.kind),
            r.value.to_string_radix(10, Some(digits))
        ));
    }
    out
}
