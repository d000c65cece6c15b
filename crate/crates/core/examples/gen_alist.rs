fn main() {
    let code = pas_core::fec::construct_ira(pas_core::fec::IraParams::BUNDLED).unwrap();
    print!("{}", code.to_alist());
}
