//! Every chapter listed in SUMMARY.md must exist and be compiled by the crate.

use std::path::Path;

#[test]
fn summary_chapters_are_all_included() {
    let book = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../book/src");
    let summary = std::fs::read_to_string(book.join("SUMMARY.md")).unwrap();
    let lib = include_str!("../src/lib.rs");
    let mut count = 0;
    for line in summary.lines() {
        let Some(start) = line.find("](") else { continue };
        let file = &line[start + 2..line.rfind(')').unwrap()];
        assert!(book.join(file).is_file(), "{file} is listed but missing");
        assert!(lib.contains(&format!("book/src/{file}")), "{file} is not compiled as a doctest");
        count += 1;
    }
    assert_eq!(count, 9);
}
