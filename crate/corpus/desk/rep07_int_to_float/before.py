def parse_price(raw):
    price = int(raw)
    return price
