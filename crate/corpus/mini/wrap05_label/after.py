def show(count):
    label = 'items: ' + str(count)
    print(label)
