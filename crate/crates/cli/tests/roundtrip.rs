//! Serialization properties: parse and write are mutually inverse.

use proptest::prelude::*;
use sciprofile::ingest::{parse_matrix, write_matrix};
use sciprofile_core::model::{CountryProfile, MatrixKind, ProfileMatrix, SubjectScheme};

fn code(i: usize) -> String {
    format!(
        "{}{}",
        char::from(b'A' + (i / 26 % 26) as u8),
        char::from(b'A' + (i % 26) as u8)
    )
}

fn arb_matrix() -> impl Strategy<Value = ProfileMatrix> {
    let name = "[ -~]{0,12}"; // printable ascii, commas and quotes included
    let share = prop_oneof![
        (0u32..1000).prop_map(|v| f64::from(v) / 10.0), // one-decimal values
        0.0f64..100.0,
    ];
    let area_count = 2usize..6;
    area_count.prop_flat_map(move |areas| {
        let rows = prop::collection::vec(
            (
                proptest::string::string_regex(name).unwrap(),
                proptest::string::string_regex(name).unwrap(),
                prop::collection::vec(share.clone(), areas),
                prop::option::of(0.0f64..100.0),
            ),
            0..8,
        );
        rows.prop_map(move |rows| {
            let area_names: Vec<String> = (0..areas).map(|i| format!("area {i}")).collect();
            let scheme = SubjectScheme::custom("custom", &area_names).unwrap();
            let profiles = rows
                .into_iter()
                .enumerate()
                .map(|(i, (name, region, shares, unclassified))| {
                    let mut p = CountryProfile::new(&code(i), &name, &region, shares);
                    p.unclassified = unclassified;
                    p
                })
                .collect();
            ProfileMatrix::new(scheme, profiles, MatrixKind::Shares)
        })
    })
}

proptest! {
    #[test]
    fn parse_write_identity(m in arb_matrix()) {
        let text = write_matrix(&m);
        let back = parse_matrix(&text, m.kind).unwrap();
        prop_assert_eq!(&m, &back);
        // and canonical text is a fixed point
        prop_assert_eq!(write_matrix(&back), text);
    }
}
