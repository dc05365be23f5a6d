fn main() {
    println!("spiralwave {}", env!("CARGO_PKG_VERSION"));
}
