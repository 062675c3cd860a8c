def parse_price(raw):
    price = float(raw)
    return price
