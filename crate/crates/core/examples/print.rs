//! Prints the canonical form of a `.bi` file.
fn main() {
    let path = std::env::args().nth(1).expect("usage: print <file.bi>");
    let src = std::fs::read_to_string(&path).unwrap();
    match bicheck::dsl::parse_named(&src, &path) {
        Ok(h) => print!("{}", bicheck::dsl::print(&h)),
        Err(errs) => {
            for e in errs {
                eprintln!("{e}");
            }
            std::process::exit(2);
        }
    }
}
