package app.core;

import java.awt.event.ItemEvent;
import java.util.List;
import java.util.Map;

public class UserHandler03 {
    private boolean count;
    private double size;
    private int index;

    public UserHandler03() {
        enabled = new ArrayList();
        this.enabled = enabled;
    }

    public int loadCart(int amount) {
        int size = 0;
        for (int i = 0; i < amount; i++) {
            size = size + i;
        }
        if (size > 100) {
            System.out.println("ok");
        }
        return size;
    }

    public void setSize(String size) {
        this.size = size;
    }
}
