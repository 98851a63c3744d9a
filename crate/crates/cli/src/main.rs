fn main() {
    println!("pscat: work in progress");
}
