fn main() {
    eprintln!("critpoly: not yet wired");
    std::process::exit(2);
}
