use super::{build_map, HydraMap};
use crate::error::{HydraError, Result};
use crate::exact::is_prime;

pub const CATALOG_NAMES: &[&str] = &["H3", "H5", "Hp:<odd prime>", "T+1", "T-1"];

fn shortened(p: i64) -> HydraMap {
    build_map(2, &[(1, 0, 2), (p, 1, 2)]).expect("H_p is well formed")
}

/// Built-in maps. `H<p>` is accepted as shorthand for `Hp:<p>`.
pub fn catalog(name: &str) -> Result<HydraMap> {
    let name = name.trim();
    match name {
        "T+1" => return build_map(3, &[(2, 0, 1), (7, 2, 3), (1, -2, 3)]),
        "T-1" => return build_map(3, &[(2, 0, 1), (1, 2, 3), (7, -2, 3)]),
        _ => {}
    }
    let digits = name.strip_prefix("Hp:").or_else(|| name.strip_prefix('H'));
    if let Some(p) = digits.and_then(|d| d.parse::<u64>().ok()) {
        if p % 2 == 1 && is_prime(p) {
            return Ok(shortened(p as i64));
        }
        return Err(HydraError::Lookup(format!("{name}: {p} is not an odd prime")));
    }
    Err(HydraError::Lookup(format!("{name:?} (known: {})", CATALOG_NAMES.join(", "))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_maps() {
        let h5 = catalog("H5").unwrap();
        assert_eq!(h5.rho(), 2);
        assert_eq!(h5.mu(), &[1, 5]);
        assert_eq!(h5.branches()[1].a, 5);
        let h7 = catalog("Hp:7").unwrap();
        assert_eq!(h7.branches()[1].a, 7);
        assert_eq!(h7, catalog("H7").unwrap());
        assert_eq!(catalog("T+1").unwrap().mu(), &[6, 7, 1]);
    }

    #[test]
    fn unknown_names() {
        assert!(matches!(catalog("H4"), Err(HydraError::Lookup(_))));
        assert!(matches!(catalog("Hp:9"), Err(HydraError::Lookup(_))));
        assert!(matches!(catalog("collatz"), Err(HydraError::Lookup(_))));
    }
}
