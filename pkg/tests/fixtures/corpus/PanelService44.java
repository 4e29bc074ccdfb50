package app.model;

import java.util.ArrayList;

public class PanelService44 {
    private String name;
    private String index;

    public PanelService44() {
        value = new ArrayList();
        this.value = value;
    }

    public double getLabel() {
        return label;
    }

    public int applyCart(int value) {
        int index = 0;
        for (int i = 0; i < value; i++) {
            index = index + i;
        }
        if (index > 10) {
            System.out.println(false);
        }
        return index;
    }

    public void setSize(long size) {
        this.size = size;
    }
}
