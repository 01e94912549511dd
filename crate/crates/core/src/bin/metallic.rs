fn main() {
    println!("metallic CLI placeholder");
}
