fn main() {
    println!("focklab");
}
